#include "rmtnet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <tuple>

#include "json.hpp"
#include "rmtnet/csv.hpp"

namespace rmt {

using nlohmann::json;

const std::array<const char*, 16> kPlayFeatureNames = {
    "play_time",        "days_played", "experience", "deaths",
    "pvp_combats",      "pve_combats", "dungeons",   "parties",
    "enchants",         "item_trades", "money_recv", "money_given",
    "money_obtained",   "money_spent", "fishing_time", "shopping_time"};

const char* trade_kind_name(TradeKind kind) {
  switch (kind) {
    case TradeKind::Direct: return "Direct";
    case TradeKind::WarehouseDeposit: return "WarehouseDeposit";
    case TradeKind::WarehouseWithdraw: return "WarehouseWithdraw";
  }
  return "Direct";
}

std::optional<TradeKind> parse_trade_kind(const std::string& token) {
  if (token == "Direct") return TradeKind::Direct;
  if (token == "WarehouseDeposit") return TradeKind::WarehouseDeposit;
  if (token == "WarehouseWithdraw") return TradeKind::WarehouseWithdraw;
  return std::nullopt;
}

std::optional<LogFormat> parse_log_format(const std::string& token) {
  if (token == "csv" || token == "CSV") return LogFormat::Csv;
  if (token == "jsonl" || token == "JSONL") return LogFormat::Jsonl;
  return std::nullopt;
}

namespace {

std::string format_double(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

bool parse_i64(const std::string& s, std::int64_t& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

bool parse_f64(const std::string& s, double& out) {
  const char* b = s.data();
  const char* e = b + s.size();
  auto [p, ec] = std::from_chars(b, e, out);
  return ec == std::errc() && p == e;
}

std::optional<bool> parse_bool_token(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0" || s.empty()) return false;
  return std::nullopt;
}

/// Header lookup for CSV parsing; -1 when a column is absent.
struct Columns {
  std::vector<int> idx;
  bool ok = true;
  std::string missing;

  Columns(const std::vector<std::string>& header, const std::vector<std::string>& names,
          std::size_t required) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      auto it = std::find(header.begin(), header.end(), names[i]);
      if (it == header.end()) {
        idx.push_back(-1);
        if (i < required && ok) {
          ok = false;
          missing = names[i];
        }
      } else {
        idx.push_back(static_cast<int>(it - header.begin()));
      }
    }
  }

  const std::string* field(const std::vector<std::string>& row, std::size_t i) const {
    const int j = idx[i];
    if (j < 0 || j >= static_cast<int>(row.size())) return nullptr;
    return &row[static_cast<std::size_t>(j)];
  }
};

template <typename Fn>
void for_each_csv_row(std::istream& in, const std::vector<std::string>& names,
                      std::size_t required, std::vector<ParseError>& errors, Fn&& fn) {
  csv::Reader reader(in);
  std::size_t line = 0;
  auto header = reader.next(line);
  if (!header) {
    errors.push_back({1, Errc::MissingField, "missing header row"});
    return;
  }
  Columns cols(*header, names, required);
  if (!cols.ok) {
    errors.push_back({line, Errc::MissingField, "header lacks column '" + cols.missing + "'"});
    return;
  }
  while (auto row = reader.next(line)) {
    if (row->size() == 1 && (*row)[0].empty()) continue;  // blank line
    fn(cols, *row, line);
  }
}

template <typename Fn>
void for_each_jsonl_row(std::istream& in, std::vector<ParseError>& errors, Fn&& fn) {
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.empty()) continue;
    json obj = json::parse(text, nullptr, false);
    if (obj.is_discarded() || !obj.is_object()) {
      errors.push_back({line, Errc::MalformedField, "not a JSON object"});
      continue;
    }
    fn(obj, line);
  }
}

std::optional<std::string> json_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  return std::nullopt;
}

}  // namespace

Parsed<TradeEvent> parse_trade_log(std::istream& in, LogFormat format) {
  Parsed<TradeEvent> out;
  std::uint64_t next_index = 0;

  auto finish = [&](TradeEvent ev, std::size_t line) {
    if (ev.kind == TradeKind::Direct && ev.source_id == ev.target_id) {
      out.errors.push_back({line, Errc::InvariantViolation, "self-trade"});
      return;
    }
    ev.index = next_index++;
    out.items.push_back(std::move(ev));
  };

  if (format == LogFormat::Csv) {
    const std::vector<std::string> names = {"ts", "src", "dst", "kind", "item", "qty", "money"};
    for_each_csv_row(in, names, names.size(), out.errors,
                     [&](const Columns& cols, const std::vector<std::string>& row,
                         std::size_t line) {
      TradeEvent ev;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (const std::string* f = cols.field(row, i); !f || f->empty()) {
          out.errors.push_back({line, Errc::MissingField, "empty field '" + names[i] + "'"});
          return;
        }
      }
      const std::string& ts = *cols.field(row, 0);
      if (!parse_i64(ts, ev.timestamp)) {
        out.errors.push_back({line, Errc::MalformedField, "bad ts '" + ts + "'"});
        return;
      }
      ev.source_id = *cols.field(row, 1);
      ev.target_id = *cols.field(row, 2);
      const std::string& kind = *cols.field(row, 3);
      auto k = parse_trade_kind(kind);
      if (!k) {
        out.errors.push_back({line, Errc::UnknownKind, "kind '" + kind + "'"});
        return;
      }
      ev.kind = *k;
      ev.item_id = *cols.field(row, 4);
      std::int64_t qty = 0, money = 0;
      if (!parse_i64(*cols.field(row, 5), qty)) {
        out.errors.push_back({line, Errc::MalformedField, "bad qty"});
        return;
      }
      if (qty < 0) {
        out.errors.push_back({line, Errc::NegativeQuantity, "qty " + std::to_string(qty)});
        return;
      }
      if (!parse_i64(*cols.field(row, 6), money)) {
        out.errors.push_back({line, Errc::MalformedField, "bad money"});
        return;
      }
      if (money < 0) {
        out.errors.push_back({line, Errc::InvariantViolation, "negative money"});
        return;
      }
      ev.quantity = static_cast<std::uint64_t>(qty);
      ev.money_value = static_cast<std::uint64_t>(money);
      finish(std::move(ev), line);
    });
  } else {
    for_each_jsonl_row(in, out.errors, [&](const json& obj, std::size_t line) {
      TradeEvent ev;
      for (const char* key : {"ts", "src", "dst", "kind", "item", "qty", "money"}) {
        if (!obj.contains(key)) {
          out.errors.push_back({line, Errc::MissingField, std::string("missing '") + key + "'"});
          return;
        }
      }
      if (!obj["ts"].is_number_integer()) {
        out.errors.push_back({line, Errc::MalformedField, "bad ts"});
        return;
      }
      ev.timestamp = obj["ts"].get<std::int64_t>();
      auto src = json_string(obj, "src");
      auto dst = json_string(obj, "dst");
      auto kind = json_string(obj, "kind");
      auto item = json_string(obj, "item");
      if (!src || !dst || !kind || !item) {
        out.errors.push_back({line, Errc::MalformedField, "bad string field"});
        return;
      }
      ev.source_id = *src;
      ev.target_id = *dst;
      auto k = parse_trade_kind(*kind);
      if (!k) {
        out.errors.push_back({line, Errc::UnknownKind, "kind '" + *kind + "'"});
        return;
      }
      ev.kind = *k;
      ev.item_id = *item;
      if (!obj["qty"].is_number_integer() || !obj["money"].is_number_integer()) {
        out.errors.push_back({line, Errc::MalformedField, "bad qty/money"});
        return;
      }
      const std::int64_t qty = obj["qty"].get<std::int64_t>();
      const std::int64_t money = obj["money"].get<std::int64_t>();
      if (qty < 0) {
        out.errors.push_back({line, Errc::NegativeQuantity, "qty " + std::to_string(qty)});
        return;
      }
      if (money < 0) {
        out.errors.push_back({line, Errc::InvariantViolation, "negative money"});
        return;
      }
      ev.quantity = static_cast<std::uint64_t>(qty);
      ev.money_value = static_cast<std::uint64_t>(money);
      finish(std::move(ev), line);
    });
  }
  return out;
}

Parsed<PlayActivityRecord> parse_play_log(std::istream& in, LogFormat format) {
  Parsed<PlayActivityRecord> out;

  auto validate = [&](const PlayActivityRecord& rec, std::size_t line) -> bool {
    for (double v : rec.f) {
      if (v < 0.0) {
        out.errors.push_back({line, Errc::InvariantViolation, "negative feature"});
        return false;
      }
    }
    if (rec.f[0] > static_cast<double>(kWeekSeconds)) {
      out.errors.push_back(
          {line, Errc::InvariantViolation, "play time exceeds a week"});
      return false;
    }
    return true;
  };

  if (format == LogFormat::Csv) {
    std::vector<std::string> names = {"user", "week"};
    for (int i = 1; i <= 16; ++i) names.push_back("f" + std::to_string(i));
    names.push_back("banned");
    const std::size_t required = names.size() - 1;  // banned optional
    for_each_csv_row(in, names, required, out.errors,
                     [&](const Columns& cols, const std::vector<std::string>& row,
                         std::size_t line) {
      PlayActivityRecord rec;
      const std::string* user = cols.field(row, 0);
      if (!user || user->empty()) {
        out.errors.push_back({line, Errc::MissingField, "empty user"});
        return;
      }
      rec.user_id = *user;
      std::int64_t week = 0;
      const std::string* wk = cols.field(row, 1);
      if (!wk || !parse_i64(*wk, week) || week < 0) {
        out.errors.push_back({line, Errc::MalformedField, "bad week"});
        return;
      }
      rec.week_index = static_cast<int>(week);
      for (int i = 0; i < 16; ++i) {
        const std::string* f = cols.field(row, static_cast<std::size_t>(2 + i));
        if (!f || f->empty()) {
          out.errors.push_back({line, Errc::MissingField, "missing f" + std::to_string(i + 1)});
          return;
        }
        if (!parse_f64(*f, rec.f[static_cast<std::size_t>(i)])) {
          out.errors.push_back({line, Errc::MalformedField, "bad f" + std::to_string(i + 1)});
          return;
        }
      }
      if (const std::string* b = cols.field(row, 18)) {
        auto flag = parse_bool_token(*b);
        if (!flag) {
          out.errors.push_back({line, Errc::MalformedField, "bad banned flag"});
          return;
        }
        rec.banned = *flag;
      }
      if (validate(rec, line)) out.items.push_back(std::move(rec));
    });
  } else {
    for_each_jsonl_row(in, out.errors, [&](const json& obj, std::size_t line) {
      PlayActivityRecord rec;
      auto user = json_string(obj, "user");
      if (!user) {
        out.errors.push_back({line, Errc::MissingField, "missing 'user'"});
        return;
      }
      rec.user_id = *user;
      if (!obj.contains("week") || !obj["week"].is_number_integer()) {
        out.errors.push_back({line, Errc::MissingField, "missing 'week'"});
        return;
      }
      rec.week_index = obj["week"].get<int>();
      for (int i = 0; i < 16; ++i) {
        const std::string key = "f" + std::to_string(i + 1);
        auto it = obj.find(key);
        if (it == obj.end() || !it->is_number()) {
          out.errors.push_back({line, Errc::MissingField, "missing '" + key + "'"});
          return;
        }
        rec.f[static_cast<std::size_t>(i)] = it->get<double>();
      }
      if (auto it = obj.find("banned"); it != obj.end() && it->is_boolean()) {
        rec.banned = it->get<bool>();
      }
      if (validate(rec, line)) out.items.push_back(std::move(rec));
    });
  }
  return out;
}

Parsed<MarketRecord> parse_market_records(std::istream& in, LogFormat format) {
  Parsed<MarketRecord> out;

  auto finish = [&](MarketRecord rec, std::size_t line) {
    if (rec.unit_price <= 0.0) {
      out.errors.push_back({line, Errc::NonPositivePrice, format_double(rec.unit_price)});
      return;
    }
    if (rec.trade_volume <= 0.0) {
      out.errors.push_back({line, Errc::NonPositiveVolume, format_double(rec.trade_volume)});
      return;
    }
    out.items.push_back(std::move(rec));
  };

  if (format == LogFormat::Csv) {
    const std::vector<std::string> names = {"price", "volume", "server", "ts"};
    for_each_csv_row(in, names, names.size(), out.errors,
                     [&](const Columns& cols, const std::vector<std::string>& row,
                         std::size_t line) {
      MarketRecord rec;
      for (std::size_t i = 0; i < names.size(); ++i) {
        if (const std::string* f = cols.field(row, i); !f || f->empty()) {
          out.errors.push_back({line, Errc::MissingField, "empty field '" + names[i] + "'"});
          return;
        }
      }
      if (!parse_f64(*cols.field(row, 0), rec.unit_price) ||
          !parse_f64(*cols.field(row, 1), rec.trade_volume)) {
        out.errors.push_back({line, Errc::MalformedField, "bad number"});
        return;
      }
      rec.server_id = *cols.field(row, 2);
      if (!parse_i64(*cols.field(row, 3), rec.completion_time)) {
        out.errors.push_back({line, Errc::MalformedField, "bad ts"});
        return;
      }
      finish(std::move(rec), line);
    });
  } else {
    for_each_jsonl_row(in, out.errors, [&](const json& obj, std::size_t line) {
      MarketRecord rec;
      for (const char* key : {"price", "volume", "server", "ts"}) {
        if (!obj.contains(key)) {
          out.errors.push_back({line, Errc::MissingField, std::string("missing '") + key + "'"});
          return;
        }
      }
      if (!obj["price"].is_number() || !obj["volume"].is_number() ||
          !obj["ts"].is_number_integer()) {
        out.errors.push_back({line, Errc::MalformedField, "bad number"});
        return;
      }
      rec.unit_price = obj["price"].get<double>();
      rec.trade_volume = obj["volume"].get<double>();
      auto server = json_string(obj, "server");
      if (!server) {
        out.errors.push_back({line, Errc::MalformedField, "bad server"});
        return;
      }
      rec.server_id = *server;
      rec.completion_time = obj["ts"].get<std::int64_t>();
      finish(std::move(rec), line);
    });
  }
  std::stable_sort(out.items.begin(), out.items.end(),
                   [](const MarketRecord& a, const MarketRecord& b) {
                     return a.completion_time < b.completion_time;
                   });
  return out;
}

void write_trade_log(std::ostream& out, const std::vector<TradeEvent>& events, LogFormat format) {
  if (format == LogFormat::Csv) {
    csv::write_row(out, {"ts", "src", "dst", "kind", "item", "qty", "money"});
    for (const TradeEvent& ev : events) {
      csv::write_row(out, {std::to_string(ev.timestamp), ev.source_id, ev.target_id,
                           trade_kind_name(ev.kind), ev.item_id, std::to_string(ev.quantity),
                           std::to_string(ev.money_value)});
    }
  } else {
    for (const TradeEvent& ev : events) {
      json obj;
      obj["ts"] = ev.timestamp;
      obj["src"] = ev.source_id;
      obj["dst"] = ev.target_id;
      obj["kind"] = trade_kind_name(ev.kind);
      obj["item"] = ev.item_id;
      obj["qty"] = ev.quantity;
      obj["money"] = ev.money_value;
      out << obj.dump() << '\n';
    }
  }
}

void write_play_log(std::ostream& out, const std::vector<PlayActivityRecord>& records,
                    LogFormat format) {
  if (format == LogFormat::Csv) {
    std::vector<std::string> header = {"user", "week"};
    for (int i = 1; i <= 16; ++i) header.push_back("f" + std::to_string(i));
    header.push_back("banned");
    csv::write_row(out, header);
    for (const PlayActivityRecord& rec : records) {
      std::vector<std::string> row = {rec.user_id, std::to_string(rec.week_index)};
      for (double v : rec.f) row.push_back(format_double(v));
      row.push_back(rec.banned ? "true" : "false");
      csv::write_row(out, row);
    }
  } else {
    for (const PlayActivityRecord& rec : records) {
      json obj;
      obj["user"] = rec.user_id;
      obj["week"] = rec.week_index;
      for (int i = 0; i < 16; ++i) obj["f" + std::to_string(i + 1)] = rec.f[static_cast<std::size_t>(i)];
      obj["banned"] = rec.banned;
      out << obj.dump() << '\n';
    }
  }
}

void write_market_records(std::ostream& out, const std::vector<MarketRecord>& records,
                          LogFormat format) {
  if (format == LogFormat::Csv) {
    csv::write_row(out, {"price", "volume", "server", "ts"});
    for (const MarketRecord& rec : records) {
      csv::write_row(out, {format_double(rec.unit_price), format_double(rec.trade_volume),
                           rec.server_id, std::to_string(rec.completion_time)});
    }
  } else {
    for (const MarketRecord& rec : records) {
      json obj;
      obj["price"] = rec.unit_price;
      obj["volume"] = rec.trade_volume;
      obj["server"] = rec.server_id;
      obj["ts"] = rec.completion_time;
      out << obj.dump() << '\n';
    }
  }
}

void apply_account_map(std::vector<TradeEvent>& events,
                       const std::unordered_map<std::string, std::string>& id_to_account) {
  if (id_to_account.empty()) return;
  for (TradeEvent& ev : events) {
    if (auto it = id_to_account.find(ev.source_id); it != id_to_account.end()) {
      ev.source_id = it->second;
    }
    if (auto it = id_to_account.find(ev.target_id); it != id_to_account.end()) {
      ev.target_id = it->second;
    }
  }
}

std::vector<WeeklyBatch> window_weekly(std::vector<TradeEvent> events, std::int64_t epoch) {
  for (const TradeEvent& ev : events) {
    if (ev.timestamp < epoch) {
      throw Error(Errc::EventBeforeEpoch,
                  "event at " + std::to_string(ev.timestamp) + " before epoch " +
                      std::to_string(epoch));
    }
  }
  auto key = [](const TradeEvent& ev) {
    return std::tie(ev.timestamp, ev.source_id, ev.target_id, ev.kind, ev.item_id, ev.quantity,
                    ev.money_value, ev.index);
  };
  std::sort(events.begin(), events.end(),
            [&](const TradeEvent& a, const TradeEvent& b) { return key(a) < key(b); });

  std::vector<WeeklyBatch> batches;
  if (events.empty()) return batches;

  const std::int64_t last_week = (events.back().timestamp - epoch) / kWeekSeconds;
  batches.resize(static_cast<std::size_t>(last_week) + 1);
  for (std::size_t w = 0; w < batches.size(); ++w) {
    batches[w].week_index = static_cast<int>(w);
  }
  for (TradeEvent& ev : events) {
    const std::int64_t w = (ev.timestamp - epoch) / kWeekSeconds;
    batches[static_cast<std::size_t>(w)].events.push_back(std::move(ev));
  }
  return batches;
}

}  // namespace rmt
