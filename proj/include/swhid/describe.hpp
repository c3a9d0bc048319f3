#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "swhid/merkle.hpp"

namespace swhid {

enum class DescribeErrorKind { SchemaError, UnknownReference };

class DescribeError : public Error {
 public:
  DescribeError(DescribeErrorKind kind, std::string location,
                const std::string& message);
  DescribeErrorKind kind() const { return kind_; }
  // JSON pointer to the offending value, e.g. "/0/author_date/offset".
  const std::string& location() const { return location_; }

 private:
  DescribeErrorKind kind_;
  std::string location_;
};

struct DescribedNode {
  std::optional<std::string> label;
  DagNode node;
  CoreSwhid id;
};

// Parses a JSON description file (a list of revision, release and snapshot
// objects). Any id-valued field may name another node of the same file as
// "@label"; such references are resolved once that node's id is known.
// Results are in file order.
std::vector<DescribedNode> describe_nodes(std::string_view json_text);

}  // namespace swhid
