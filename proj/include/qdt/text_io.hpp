#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "qdt/adaptive.hpp"
#include "qdt/coherent.hpp"

namespace qdt {

/// Matrix text format shared by probe sets and POVMs:
///
///   d M label
///   <block label>
///   d rows of real parts
///   d rows of imaginary parts
///   ... (M blocks)
///
/// Blank lines and lines starting with '#' are skipped.
struct MatrixFile {
  int dim = 0;
  std::string label;
  std::vector<std::string> names;
  std::vector<CMatrix> mats;
};

void write_matrix_file(std::ostream& os, const MatrixFile& f);
MatrixFile read_matrix_file(std::istream& is);

void write_probe_set(std::ostream& os, const ProbeSet& set, const std::string& label);
ProbeSet read_probe_set(std::istream& is);
void write_povm(std::ostream& os, const Povm& povm, const std::string& label);
Povm read_povm(std::istream& is);

ProbeSet load_probe_set(const std::string& path);
Povm load_povm(const std::string& path);
void save_probe_set(const std::string& path, const ProbeSet& set, const std::string& label);
void save_povm(const std::string& path, const Povm& povm, const std::string& label);

/// Every CSV starts with "# schema=<name> seed=<seed>" followed by the header row.
void write_frequencies_csv(std::ostream& os, const FrequencyData& data);
void write_superposition_csv(std::ostream& os, const CoherentSuperposition& sup, std::uint64_t seed);
/// Several superpositions in one file: a leading `state` column is added.
void write_superposition_set_csv(std::ostream& os, const SuperposedSet& set, std::uint64_t seed);
/// Columns N,rep,element,infidelity,mse; element is 1-based.
void write_record_csv(std::ostream& os, const ExperimentRecord& rec);

/// Rows of a record CSV read back (for slope fitting of saved runs).
std::vector<ExperimentRow> read_record_csv(std::istream& is);

/// Shortest round-trip decimal form.
std::string format_double(double v);

}  // namespace qdt
