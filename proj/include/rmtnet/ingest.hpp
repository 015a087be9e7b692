#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rmtnet/error.hpp"

namespace rmt {

inline constexpr std::int64_t kWeekSeconds = 7 * 86400;

enum class TradeKind : std::uint8_t { Direct, WarehouseDeposit, WarehouseWithdraw };

const char* trade_kind_name(TradeKind kind);
std::optional<TradeKind> parse_trade_kind(const std::string& token);

/// One virtual-goods transfer, direct or warehouse-mediated.
struct TradeEvent {
  std::int64_t timestamp = 0;  // UTC seconds
  std::string source_id;
  std::string target_id;
  TradeKind kind = TradeKind::Direct;
  std::string item_id;
  std::uint64_t quantity = 0;
  std::uint64_t money_value = 0;  // game-money units
  std::uint64_t index = 0;        // position in the parsed stream

  friend bool operator==(const TradeEvent&, const TradeEvent&) = default;
};

/// One user-week of play activity. Feature slots f[0..15]:
///   0 play time (s)        1 days played        2 experience gained
///   3 deaths               4 PvP combats        5 PvE combats
///   6 dungeons             7 parties            8 enchants
///   9 item trades         10 game money recv   11 game money given
///  12 money obtained      13 money spent       14 fishing time (s)
///  15 shopping time (s)
struct PlayActivityRecord {
  std::string user_id;
  int week_index = 0;
  std::array<double, 16> f{};
  bool banned = false;

  friend bool operator==(const PlayActivityRecord&, const PlayActivityRecord&) = default;
};

extern const std::array<const char*, 16> kPlayFeatureNames;

/// One out-game market listing completion.
struct MarketRecord {
  double unit_price = 0.0;   // real currency per unit of game money
  double trade_volume = 0.0; // game-money units
  std::string server_id;
  std::int64_t completion_time = 0;

  friend bool operator==(const MarketRecord&, const MarketRecord&) = default;
};

struct WeeklyBatch {
  int week_index = 0;
  std::vector<TradeEvent> events;
};

enum class LogFormat { Csv, Jsonl };

std::optional<LogFormat> parse_log_format(const std::string& token);

// Column layouts (CSV header / JSONL keys):
//   trade:  ts,src,dst,kind,item,qty,money
//   play:   user,week,f1..f16,banned         (banned optional, defaults false)
//   market: price,volume,server,ts
Parsed<TradeEvent> parse_trade_log(std::istream& in, LogFormat format);
Parsed<PlayActivityRecord> parse_play_log(std::istream& in, LogFormat format);
Parsed<MarketRecord> parse_market_records(std::istream& in, LogFormat format);

void write_trade_log(std::ostream& out, const std::vector<TradeEvent>& events, LogFormat format);
void write_play_log(std::ostream& out, const std::vector<PlayActivityRecord>& records, LogFormat format);
void write_market_records(std::ostream& out, const std::vector<MarketRecord>& records, LogFormat format);

/// Optional preprocessing step: collapse character ids onto account ids.
/// Ids missing from the map pass through unchanged.
void apply_account_map(std::vector<TradeEvent>& events,
                       const std::unordered_map<std::string, std::string>& id_to_account);

/// Slice events into gap-free weekly batches anchored at `epoch`. An event
/// exactly on a boundary belongs to the later week. Events inside each
/// batch are put in canonical order (timestamp, then remaining fields), so
/// the result does not depend on input order. Throws EventBeforeEpoch.
std::vector<WeeklyBatch> window_weekly(std::vector<TradeEvent> events, std::int64_t epoch);

}  // namespace rmt
