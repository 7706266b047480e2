#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include "patterndyn/distributions.hpp"
#include "patterndyn/model.hpp"
#include "patterndyn/training.hpp"

namespace patterndyn {

/// Decimal with 17 significant digits; round-trips a double.
std::string format_double(double v);
double parse_double(std::string_view s);

/// First line `kind,d,k,epsilon,seed` (values), then `y,key_slots,x_1,...,x_D`
/// per sample; multiple key slots are joined with ';'.
void write_dataset_csv(std::ostream& out, const Dataset& data);
/// Reads a dataset written for `spec`; the header must agree with it.
Dataset read_dataset_csv(std::istream& in, const DistSpec& spec);

/// First line `h,d,mode` (values), then `a_i,w_i1,...,w_id` per filter.
void write_bank_csv(std::ostream& out, const FilterBank& bank);
FilterBank read_bank_csv(std::istream& in);

/// `step,filter_id,a_i,norm,alpha_1[,alpha_2...],perp_norm,sin_theta,target_id`.
void write_trajectory_csv(std::ostream& out, std::span<const TrajectoryRecord> records);

/// Writes bytes to path, creating parent directories; throws io on failure.
void write_file(const std::filesystem::path& path, const std::string& bytes);

}  // namespace patterndyn
