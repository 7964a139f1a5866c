#include "opfkit/scenario_tree.hpp"

#include <algorithm>
#include <functional>
#include <filesystem>
#include <fstream>
#include <set>

#include "opfkit/embedded.hpp"
#include "opfkit/errors.hpp"

namespace opfkit {

namespace {

const char* kDirectionWords[] = {"increase", "decrease", "set zero", "setzero"};

bool contains_ci(const std::string& text, const std::string& needle) {
  auto it = std::search(text.begin(), text.end(), needle.begin(), needle.end(),
                        [](char a, char b) { return std::tolower(a) == std::tolower(b); });
  return it != text.end();
}

TreeNode parse_node(const nlohmann::json& j, const std::string& ptr, bool below_m) {
  if (!j.is_object()) throw SchemaError("tree node must be an object", ptr);
  TreeNode node;
  const std::string level = j.value("level", "");
  node.text = j.value("text", "");
  if (level == "E") {
    node.level = TreeLevel::E;
    if (below_m) throw SchemaError("E-level node may not appear below an M-level node", ptr);
  } else if (level == "M") {
    node.level = TreeLevel::M;
  } else if (level == "LEAF") {
    node.level = TreeLevel::Leaf;
  } else {
    throw SchemaError("node level must be E, M or LEAF", ptr);
  }

  const bool has_children = j.contains("children") && !j.at("children").empty();
  const bool has_annotation = j.contains("annotation");
  if (node.level == TreeLevel::Leaf) {
    if (has_children) throw SchemaError("leaf nodes carry no children", ptr);
    if (!has_annotation) throw SchemaError("leaf node is missing its annotation", ptr);
    const auto& a = j.at("annotation");
    LeafAnnotation ann;
    if (!a.contains("component") || !a.contains("parameter") || !a.contains("direction"))
      throw SchemaError("annotation needs component/parameter/direction", ptr + "/annotation");
    ann.component = component_from_string(a.at("component").get<std::string>());
    ann.parameter = target_parameter_from_string(a.at("parameter").get<std::string>());
    ann.direction = direction_from_string(a.at("direction").get<std::string>());
    ParameterPatch shape;
    shape.component = ann.component;
    shape.target = ann.parameter;
    shape.direction = ann.direction;
    shape.bus_id = 1;
    shape.fbus = 1;
    shape.tbus = 2;
    validate_patch_shape(shape);  // (component, parameter) legality
    node.annotation = ann;
    return node;
  }
  if (has_annotation) throw SchemaError("only leaf nodes carry annotations", ptr);
  if (!has_children) throw SchemaError("non-leaf node has no children", ptr);
  if (leaks_inference_target(node.text))
    throw SchemaError("narrative text leaks an inference target", ptr);
  int i = 0;
  for (const auto& jc : j.at("children"))
    node.children.push_back(parse_node(jc, ptr + "/children/" + std::to_string(i++),
                                       below_m || node.level == TreeLevel::M));
  return node;
}

void validate_slots(const ScenarioTree& tree) {
  // every leaf's path must name the concrete target location
  std::vector<const TreeNode*> path;
  std::function<void(const TreeNode&)> walk = [&](const TreeNode& node) {
    path.push_back(&node);
    if (node.level == TreeLevel::Leaf) {
      std::string text;
      for (const auto* n : path) text += n->text;
      const bool branch = node.annotation->component == Component::Branch;
      if (branch) {
        if (text.find("{fbus}") == std::string::npos ||
            text.find("{tbus}") == std::string::npos)
          throw SchemaError("branch-annotated path lacks {fbus}/{tbus} slots",
                            "/" + tree.id);
      } else if (text.find("{bus}") == std::string::npos) {
        throw SchemaError("bus/gen-annotated path lacks a {bus} slot", "/" + tree.id);
      }
    }
    for (const auto& child : node.children) walk(child);
    path.pop_back();
  };
  walk(tree.root);
}

void replace_all(std::string& text, const std::string& slot, const std::string& value) {
  std::size_t pos = 0;
  while ((pos = text.find(slot, pos)) != std::string::npos) {
    text.replace(pos, slot.size(), value);
    pos += value.size();
  }
}

}  // namespace

bool leaks_inference_target(const std::string& text) {
  for (int i = 0; i < 17; ++i)
    if (text.find(to_string(static_cast<TargetParameter>(i))) != std::string::npos)
      return true;
  for (const char* word : kDirectionWords)
    if (contains_ci(text, word)) return true;
  return false;
}

ScenarioTree parse_tree(const nlohmann::json& doc) {
  if (!doc.is_object()) throw SchemaError("tree document must be an object", "/");
  if (doc.contains("schema") && doc.at("schema") != "tree/1")
    throw SchemaError("unsupported tree schema", "/schema");
  ScenarioTree tree;
  tree.id = doc.value("id", "");
  if (tree.id.empty()) throw SchemaError("tree needs an id", "/id");
  if (!doc.contains("root")) throw SchemaError("tree needs a root node", "/root");
  tree.root = parse_node(doc.at("root"), "/root", false);
  if (tree.root.level == TreeLevel::Leaf)
    throw SchemaError("root node cannot be a leaf", "/root");
  validate_slots(tree);
  return tree;
}

const std::vector<ScenarioTree>& tree_library() {
  static const std::vector<ScenarioTree> library = [] {
    std::vector<ScenarioTree> trees;
    for (const auto& [key, blob] : embedded::files()) {
      if (key.rfind("trees/", 0) != 0) continue;
      trees.push_back(parse_tree(nlohmann::json::parse(blob)));
    }
    return trees;
  }();
  return library;
}

std::vector<ScenarioTree> load_trees_from_dir(const std::string& dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") paths.push_back(entry.path());
  std::sort(paths.begin(), paths.end());
  std::vector<ScenarioTree> trees;
  for (const auto& p : paths) {
    std::ifstream in(p);
    trees.push_back(parse_tree(nlohmann::json::parse(in)));
  }
  return trees;
}

std::vector<LeafRef> retrieve(const std::vector<ScenarioTree>& trees, Component component,
                              TargetParameter parameter, Direction direction) {
  std::vector<LeafRef> out;
  for (const auto& tree : trees) {
    std::vector<const TreeNode*> path;
    std::function<void(const TreeNode&)> walk = [&](const TreeNode& node) {
      path.push_back(&node);
      if (node.level == TreeLevel::Leaf && node.annotation->component == component &&
          node.annotation->parameter == parameter && node.annotation->direction == direction)
        out.push_back({&tree, path});
      for (const auto& child : node.children) walk(child);
      path.pop_back();
    };
    walk(tree.root);
  }
  return out;
}

ScenarioFragment sample_fragment(const std::vector<LeafRef>& leaves,
                                 const FragmentTarget& target, Rng& rng) {
  if (leaves.empty()) throw Error("no scenario-tree leaf covers the requested patch");
  const LeafRef& pick = leaves[rng.next_below(leaves.size())];
  std::string text;
  for (const auto* node : pick.path) {
    if (node->level == TreeLevel::Leaf || node->text.empty()) continue;
    if (!text.empty()) text += " ";
    text += node->text;
  }
  replace_all(text, "{bus}", std::to_string(target.bus));
  replace_all(text, "{fbus}", std::to_string(target.fbus));
  replace_all(text, "{tbus}", std::to_string(target.tbus));
  if (text.find('{') != std::string::npos)
    throw Error("fragment has an unfilled slot: " + text);
  ScenarioFragment frag;
  frag.text = text;
  frag.tree_id = pick.tree->id;
  return frag;
}

std::vector<DirectionalTriple> covered_triples(const std::vector<ScenarioTree>& trees) {
  std::set<DirectionalTriple> seen;
  for (const auto& tree : trees) {
    std::function<void(const TreeNode&)> walk = [&](const TreeNode& node) {
      if (node.annotation)
        seen.insert({node.annotation->component, node.annotation->parameter,
                     node.annotation->direction});
      for (const auto& child : node.children) walk(child);
    };
    walk(tree.root);
  }
  return {seen.begin(), seen.end()};
}

}  // namespace opfkit
