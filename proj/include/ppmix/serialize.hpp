#pragma once

#include <string>

#include "ppmix/em.hpp"
#include "ppmix/ga.hpp"
#include "ppmix/mixture.hpp"
#include "ppmix/modal_em.hpp"

namespace ppmix {

/// JSON round-trip for fitted models. Doubles are written shortest
/// round-trip, so save/load is exact. Layout:
/// { n_components, dim, family, weights, means: [[...]],
///   covariances: [flat row-major dim*dim], log_likelihood, bic,
///   n_parameters }
std::string fit_to_json(const FitReport& fit);
FitReport fit_from_json(const std::string& text);

void save_fit(const std::string& path, const FitReport& fit);
/// Throws ParseError on malformed or structurally invalid content.
FitReport load_fit(const std::string& path);

/// Projection result: basis (row-major p x d), angles, scores, and the
/// projected model inline under "projected".
std::string projection_to_json(const PpResult& pp);
PpResult projection_from_json(const std::string& text);

void save_projection(const std::string& path, const PpResult& pp);
PpResult load_projection(const std::string& path);

/// Modal clustering summary: modes (m x d), n_modes, density_at_modes,
/// 1-based assignments, per-row iterations, and paths when recorded.
std::string modal_to_json(const ModalResult& result);

}  // namespace ppmix
