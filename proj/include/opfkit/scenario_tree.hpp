#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "opfkit/modelspec.hpp"
#include "opfkit/rng.hpp"

namespace opfkit {

struct LeafAnnotation {
  Component component = Component::Bus;
  TargetParameter parameter = TargetParameter::PD;
  Direction direction = Direction::Increase;
};

enum class TreeLevel { E, M, Leaf };

struct TreeNode {
  std::string text;
  TreeLevel level = TreeLevel::E;
  std::vector<TreeNode> children;
  std::optional<LeafAnnotation> annotation;  // leaf nodes only
};

/// Expert scenario hierarchy: event-level narrative above mechanism-level
/// narrative, leaves annotated with (component, parameter, direction).
struct ScenarioTree {
  std::string id;
  TreeNode root;
};

/// Parses and validates one tree document (schema tree/1): the E-above-M
/// ordering, leaf/annotation correspondence, slot presence for the leaf's
/// component, and the anti-leak denylist over narrative text.
ScenarioTree parse_tree(const nlohmann::json& doc);

/// The starter library embedded from data/trees/.
const std::vector<ScenarioTree>& tree_library();

/// Trees loaded from *.json files in a directory (sorted by filename).
std::vector<ScenarioTree> load_trees_from_dir(const std::string& dir);

/// One retrieved leaf with its root-to-leaf path.
struct LeafRef {
  const ScenarioTree* tree = nullptr;
  std::vector<const TreeNode*> path;  // root ... leaf
};

/// All leaves whose annotation matches the query triple, in tree/DFS order.
std::vector<LeafRef> retrieve(const std::vector<ScenarioTree>& trees, Component component,
                              TargetParameter parameter, Direction direction);

struct ScenarioFragment {
  std::string text;
  std::string tree_id;
};

/// Concrete location the fragment narrates (bus id, or branch endpoints).
struct FragmentTarget {
  int bus = 0;
  int fbus = 0, tbus = 0;
};

/// Uniform draw over the retrieved root-to-leaf paths; slot placeholders
/// ({bus}, {fbus}, {tbus}) are spliced with the target identifiers.
ScenarioFragment sample_fragment(const std::vector<LeafRef>& leaves,
                                 const FragmentTarget& target, Rng& rng);

/// Anti-leak check: true when the text contains a parameter enum name or a
/// direction keyword.
bool leaks_inference_target(const std::string& text);

/// Directional triples the library can narrate.
std::vector<DirectionalTriple> covered_triples(const std::vector<ScenarioTree>& trees);

}  // namespace opfkit
