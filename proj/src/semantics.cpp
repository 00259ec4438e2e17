#include "mapcore/semantics.hpp"

namespace mapcore {

std::string_view to_string(SemanticGroup g) {
  switch (g) {
    case SemanticGroup::kFlat: return "flat";
    case SemanticGroup::kConstruction: return "construction";
    case SemanticGroup::kObject: return "object";
    case SemanticGroup::kNature: return "nature";
    case SemanticGroup::kExcluded: return "excluded";
  }
  return "excluded";
}

namespace {

constexpr std::array<std::string_view, 19> kTrainNames{
    "road",       "sidewalk",  "building", "wall",  "fence",      "pole",   "traffic light",
    "traffic sign", "vegetation", "terrain", "sky", "person",     "rider",  "car",
    "truck",      "bus",       "train",    "motorcycle", "bicycle"};

}  // namespace

std::string_view train_id_name(std::uint8_t id) {
  return id < kTrainNames.size() ? kTrainNames[id] : "void";
}

SemanticGroup group_of(std::uint8_t id) {
  using namespace train_id;
  switch (id) {
    case kRoad:
    case kSidewalk:
      return SemanticGroup::kFlat;
    case kBuilding:
    case kWall:
    case kFence:
      return SemanticGroup::kConstruction;
    case kPole:
    case kTrafficLight:
    case kTrafficSign:
      return SemanticGroup::kObject;
    case kVegetation:
    case kTerrain:
      return SemanticGroup::kNature;
    default:
      return SemanticGroup::kExcluded;
  }
}

SemanticGroup group_of_label_id(int label_id) {
  switch (label_id) {
    case 7:   // road
    case 8:   // sidewalk
    case 9:   // parking
    case 10:  // rail track
      return SemanticGroup::kFlat;
    case 11:  // building
    case 12:  // wall
    case 13:  // fence
    case 14:  // guard rail
    case 15:  // bridge
    case 16:  // tunnel
      return SemanticGroup::kConstruction;
    case 17:  // pole
    case 18:  // polegroup
    case 19:  // traffic light
    case 20:  // traffic sign
      return SemanticGroup::kObject;
    case 21:  // vegetation
    case 22:  // terrain
      return SemanticGroup::kNature;
    default:
      return SemanticGroup::kExcluded;
  }
}

}  // namespace mapcore
