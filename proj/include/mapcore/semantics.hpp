#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace mapcore {

/// Coarse grouping of Cityscapes classes used to break down depth errors.
/// People, vehicles, sky and void are excluded from evaluation.
enum class SemanticGroup { kFlat, kConstruction, kObject, kNature, kExcluded };

inline constexpr std::array<SemanticGroup, 4> kEvaluatedGroups{
    SemanticGroup::kFlat, SemanticGroup::kConstruction, SemanticGroup::kObject,
    SemanticGroup::kNature};

std::string_view to_string(SemanticGroup g);

/// Cityscapes train IDs (0..18); 255 is void.
namespace train_id {
inline constexpr std::uint8_t kRoad = 0;
inline constexpr std::uint8_t kSidewalk = 1;
inline constexpr std::uint8_t kBuilding = 2;
inline constexpr std::uint8_t kWall = 3;
inline constexpr std::uint8_t kFence = 4;
inline constexpr std::uint8_t kPole = 5;
inline constexpr std::uint8_t kTrafficLight = 6;
inline constexpr std::uint8_t kTrafficSign = 7;
inline constexpr std::uint8_t kVegetation = 8;
inline constexpr std::uint8_t kTerrain = 9;
inline constexpr std::uint8_t kSky = 10;
inline constexpr std::uint8_t kPerson = 11;
inline constexpr std::uint8_t kRider = 12;
inline constexpr std::uint8_t kCar = 13;
inline constexpr std::uint8_t kTruck = 14;
inline constexpr std::uint8_t kBus = 15;
inline constexpr std::uint8_t kTrain = 16;
inline constexpr std::uint8_t kMotorcycle = 17;
inline constexpr std::uint8_t kBicycle = 18;
inline constexpr std::uint8_t kVoid = 255;
}  // namespace train_id

/// Name of a train ID ("road", "traffic sign", ...); "void" for anything else.
std::string_view train_id_name(std::uint8_t id);

/// Total over all byte values; unknown IDs and void map to kExcluded.
SemanticGroup group_of(std::uint8_t train_id);

/// Grouping over the full Cityscapes label IDs (0..33, -1), which also carry
/// classes absent from the train-ID set (parking, rail track, guard rail,
/// bridge, tunnel, pole group).
SemanticGroup group_of_label_id(int label_id);

}  // namespace mapcore
