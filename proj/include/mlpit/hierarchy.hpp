#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "mlpit/ou.hpp"

namespace mlpit {

/// Samples of one level at one time. Order carries no meaning.
using Ensemble = std::vector<double>;

/// Scalar observable applied to model state.
using Observable = std::function<double(double)>;

inline double identity_observable(double x) { return x; }

/// Coupled (fine, coarse) samples of one difference estimator; fine[i] and
/// coarse[i] share their driving noise.
struct LevelPairEnsemble {
    Ensemble fine;
    Ensemble coarse;

    std::size_t size() const noexcept { return fine.size(); }
};

/// Level-0 ensemble plus L coupled pair ensembles. pairs[l - 1] holds the
/// level-l correction. `grids` is either empty or has one entry per level.
struct Hierarchy {
    Ensemble level0;
    std::vector<LevelPairEnsemble> pairs;
    std::vector<LevelGrid> grids;

    int finest_level() const noexcept { return static_cast<int>(pairs.size()); }
    std::size_t size_at(int level) const;
    std::vector<std::size_t> sizes() const;

    /// Throws ErrorCode::structure on empty levels, mismatched pair lengths or a
    /// grid list of the wrong length.
    void validate() const;
};

}  // namespace mlpit
