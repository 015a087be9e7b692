#include "rmtnet/graph_io.hpp"

#include <ostream>

namespace rmt {

namespace {

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  return out;
}

}  // namespace

void write_graphml(std::ostream& out, const TradeNetwork& net,
                   const NodeAnnotations& annotations) {
  const bool tagged = annotations.partition != nullptr;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      << "  <key id=\"role\" for=\"node\" attr.name=\"role\" attr.type=\"string\"/>\n";
  if (tagged) {
    out << "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"int\"/>\n";
    if (annotations.type_of_community) {
      out << "  <key id=\"type\" for=\"node\" attr.name=\"type\" attr.type=\"string\"/>\n";
    }
  }
  out << "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      << "  <key id=\"money\" for=\"edge\" attr.name=\"money\" attr.type=\"double\"/>\n"
      << "  <graph id=\"week" << net.week_index << "\" edgedefault=\"directed\">\n";
  for (int v = 0; v < net.node_count(); ++v) {
    out << "    <node id=\"" << xml_escape(net.node_id(v)) << "\">"
        << "<data key=\"role\">"
        << (net.node_role(v) == NodeRole::Warehouse ? "warehouse" : "character") << "</data>";
    if (tagged) {
      const int c = annotations.partition->assignment[static_cast<std::size_t>(v)];
      out << "<data key=\"community\">" << c << "</data>";
      if (annotations.type_of_community) {
        out << "<data key=\"type\">"
            << community_type_name((*annotations.type_of_community)[static_cast<std::size_t>(c)])
            << "</data>";
      }
    }
    out << "</node>\n";
  }
  for (const TradeNetwork::Edge& e : net.edges()) {
    out << "    <edge source=\"" << xml_escape(net.node_id(e.src)) << "\" target=\""
        << xml_escape(net.node_id(e.dst)) << "\"><data key=\"weight\">" << e.weight
        << "</data><data key=\"money\">" << e.money << "</data></edge>\n";
  }
  out << "  </graph>\n</graphml>\n";
}

void write_dot(std::ostream& out, const TradeNetwork& net, const NodeAnnotations& annotations) {
  const bool tagged = annotations.partition != nullptr;
  out << "digraph week" << net.week_index << " {\n";
  for (int v = 0; v < net.node_count(); ++v) {
    out << "  \"" << dot_escape(net.node_id(v)) << "\" [role="
        << (net.node_role(v) == NodeRole::Warehouse ? "warehouse" : "character");
    if (tagged) {
      const int c = annotations.partition->assignment[static_cast<std::size_t>(v)];
      out << ", community=" << c;
      if (annotations.type_of_community) {
        out << ", type=\""
            << community_type_name((*annotations.type_of_community)[static_cast<std::size_t>(c)])
            << "\"";
      }
    }
    out << "];\n";
  }
  for (const TradeNetwork::Edge& e : net.edges()) {
    out << "  \"" << dot_escape(net.node_id(e.src)) << "\" -> \""
        << dot_escape(net.node_id(e.dst)) << "\" [weight=" << e.weight << ", money=" << e.money
        << "];\n";
  }
  out << "}\n";
}

}  // namespace rmt
