#ifndef TGFL_SERIALIZE_HPP
#define TGFL_SERIALIZE_HPP

#include <string>

#include "tgfl/metric.hpp"

namespace tgfl {

/// Atlas document: charts, transitions, optional foliation/flow/metric, all
/// expressions in prefix s-expression form. Round trips preserve evaluation
/// to 1e-12 (constants are printed with max precision).
struct AtlasDocument {
  AtlasManifold atlas;
  std::optional<FoliationSpec> foliation;
  std::optional<FlowSpec> flow;
  std::optional<MetricField> metric;
};

std::string to_json(const AtlasDocument& doc);
AtlasDocument document_from_json(const std::string& text);

}  // namespace tgfl

#endif  // TGFL_SERIALIZE_HPP
