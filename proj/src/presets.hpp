#pragma once

#include "config.hpp"

#include <degenid/inversion.hpp>

#include <string>
#include <vector>

namespace degenid::app {

// Compiled-in experiment presets test1..test14 plus the bare "custom"
// template. Every preset serializes to the flat config schema, so a run is
// always reproducible from its saved config alone.
std::vector<std::string> preset_names();
Config preset_config(const std::string& name);  // invalid_argument on unknown name

// A runnable inverse problem assembled from a config: spec plus the pieces
// the runner needs that the spec does not carry.
struct Problem {
  std::string name;
  InverseProblemSpec<double> spec;
  Vector<double> truth;
  ObsKind obs_kind;
  double t0;  // interior observation time; unused for boundary data
  std::vector<std::string> param_names;
};

Problem problem_from_config(const Config& cfg);

// Named ingredients of the config schema, shared with the forward command.
std::function<double(double)> u0_by_name(const std::string& name);
SourceFn<double> source_by_name(const std::string& name);
DiffusionModel<double> build_model(ParamFamily family, double fixed_alpha,
                                   const Vector<double>& params);
ParamFamily family_by_name(const std::string& name);
DegeneracyKind kind_by_name(const std::string& name);

}  // namespace degenid::app
