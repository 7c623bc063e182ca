#pragma once

#include <iosfwd>
#include <variant>

#include "microprop/pcr.hpp"
#include "microprop/svr.hpp"

namespace microprop::regress {

/// Text model format, one field per line:
///
///   microprop-model 1
///   kind svr|pcr
///   <name> <value...>
///   ...
///   end
///
/// Reals are written with 17 significant digits, so a loaded model predicts
/// bit-identically to the saved one.
void save_model(std::ostream& out, const SvrModel& model);
void save_model(std::ostream& out, const PcrModel& model);

using AnyModel = std::variant<PcrModel, SvrModel>;

/// Throws ModelFormat on a malformed or unknown-version stream.
AnyModel load_model(std::istream& in);

}  // namespace microprop::regress
