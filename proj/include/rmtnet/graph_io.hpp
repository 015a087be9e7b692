#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "rmtnet/community.hpp"
#include "rmtnet/graph.hpp"
#include "rmtnet/tagging.hpp"

namespace rmt {

/// Optional per-node annotations for exports.
struct NodeAnnotations {
  const CommunityPartition* partition = nullptr;
  const std::vector<CommunityType>* type_of_community = nullptr;
};

void write_graphml(std::ostream& out, const TradeNetwork& net,
                   const NodeAnnotations& annotations = {});
void write_dot(std::ostream& out, const TradeNetwork& net,
               const NodeAnnotations& annotations = {});

}  // namespace rmt
