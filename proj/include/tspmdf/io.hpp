#pragma once

#include <cstdint>
#include <string>

#include "tspmdf/agnn.hpp"
#include "tspmdf/core.hpp"

namespace tspmdf {

/// Parses the TSPLib subset used here: TYPE TSP, EDGE_WEIGHT_TYPE EUC_2D (or
/// CEIL_2D, whose coordinates read the same way), DIMENSION, and a
/// NODE_COORD_SECTION with 1-based indices in order. Throws ParseError naming
/// the offending line.
TspInstance parse_tsplib(const std::string& text);

TspInstance read_tsplib_file(const std::string& path);

/// TSPLib text with coordinates at 17 significant digits, so
/// parse(serialize(x)) reproduces every double bit-for-bit.
std::string serialize_tsplib(const TspInstance& inst);

void write_tsplib_file(const TspInstance& inst, const std::string& path);

/// n points i.i.d. uniform in [0,1)^2 from the counter-based generator
/// documented in rng.hpp, stream (seed, index). Instance `index` of a set
/// can be generated on its own, in any order, on any thread.
TspInstance generate_uniform(int n, std::uint64_t seed, std::uint64_t index = 0);

struct LoadedCheckpoint {
    ModelParams params;
    OptimizerState opt;
    int k = 0;  // base-graph out-degree the model was trained with
};

/// Binary container: magic "TSPMDFCP", format version, a JSON header
/// (dimensions, head kind, k, optimizer hyperparameters, tensor manifest
/// with names and shapes), then every tensor as little-endian 64-bit floats
/// in manifest order: parameters, first moments, second moments. The
/// round-trip is bitwise lossless.
void save_checkpoint(const std::string& path, const ModelParams& params,
                     const OptimizerState& opt, int k);

/// Rejects unknown versions, manifest/shape inconsistencies, and truncated
/// payloads (IoError/ParseError) instead of returning garbage.
LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace tspmdf
