#include "qdt/text_io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qdt {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

bool next_content_line(std::istream& is, std::string& line, int& lineno) {
  while (std::getline(is, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    line = line.substr(first);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) line.pop_back();
    return true;
  }
  return false;
}

[[noreturn]] void io_error(int lineno, const std::string& msg) {
  throw Error(ErrorCode::Io, "line " + std::to_string(lineno) + ": " + msg);
}

}  // namespace

void write_matrix_file(std::ostream& os, const MatrixFile& f) {
  os << f.dim << ' ' << f.mats.size() << ' ' << (f.label.empty() ? "unnamed" : f.label) << '\n';
  for (std::size_t k = 0; k < f.mats.size(); ++k) {
    os << (k < f.names.size() && !f.names[k].empty() ? f.names[k] : std::to_string(k)) << '\n';
    for (int part = 0; part < 2; ++part) {
      for (int r = 0; r < f.dim; ++r) {
        for (int c = 0; c < f.dim; ++c) {
          const Complex z = f.mats[k](r, c);
          os << (c ? " " : "") << format_double(part == 0 ? z.real() : z.imag());
        }
        os << '\n';
      }
    }
  }
}

MatrixFile read_matrix_file(std::istream& is) {
  MatrixFile f;
  std::string line;
  int lineno = 0;
  if (!next_content_line(is, line, lineno)) io_error(lineno, "missing header 'd M label'");
  std::istringstream hdr(line);
  long m = 0;
  if (!(hdr >> f.dim >> m) || f.dim < 1 || m < 1) io_error(lineno, "header must be 'd M label' with d, M >= 1");
  std::getline(hdr >> std::ws, f.label);
  for (long k = 0; k < m; ++k) {
    if (!next_content_line(is, line, lineno)) io_error(lineno, "missing label for block " + std::to_string(k));
    f.names.push_back(line);
    CMatrix mat(f.dim, f.dim);
    for (int part = 0; part < 2; ++part) {
      for (int r = 0; r < f.dim; ++r) {
        if (!next_content_line(is, line, lineno)) io_error(lineno, "unexpected end of file in block " + std::to_string(k));
        std::istringstream row(line);
        for (int c = 0; c < f.dim; ++c) {
          double v;
          if (!(row >> v)) io_error(lineno, "expected " + std::to_string(f.dim) + " numbers");
          if (part == 0) {
            mat(r, c) = Complex(v, 0.0);
          } else {
            mat(r, c) += Complex(0.0, v);
          }
        }
      }
    }
    f.mats.push_back(mat);
  }
  return f;
}

void write_probe_set(std::ostream& os, const ProbeSet& set, const std::string& label) {
  MatrixFile f;
  f.dim = set.dim();
  f.label = label;
  f.names = set.labels();
  for (const auto& s : set.states()) f.mats.push_back(s.matrix());
  write_matrix_file(os, f);
}

ProbeSet read_probe_set(std::istream& is) {
  const MatrixFile f = read_matrix_file(is);
  std::vector<DensityMatrix> states;
  for (const auto& m : f.mats) states.emplace_back(HermitianOp(m, 1e-9));
  return ProbeSet(std::move(states), f.names);
}

void write_povm(std::ostream& os, const Povm& povm, const std::string& label) {
  MatrixFile f;
  f.dim = povm.dim();
  f.label = label;
  for (std::size_t i = 0; i < povm.size(); ++i) {
    f.names.push_back("P" + std::to_string(i + 1));
    f.mats.push_back(povm[i].matrix());
  }
  write_matrix_file(os, f);
}

Povm read_povm(std::istream& is) {
  const MatrixFile f = read_matrix_file(is);
  std::vector<HermitianOp> el;
  for (const auto& m : f.mats) el.emplace_back(m, 1e-9);
  return Povm(std::move(el));
}

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write '" + path + "'");
  return out;
}

}  // namespace

ProbeSet load_probe_set(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_probe_set(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

Povm load_povm(const std::string& path) {
  auto in = open_in(path);
  try {
    return read_povm(in);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

void save_probe_set(const std::string& path, const ProbeSet& set, const std::string& label) {
  auto out = open_out(path);
  write_probe_set(out, set, label);
}

void save_povm(const std::string& path, const Povm& povm, const std::string& label) {
  auto out = open_out(path);
  write_povm(out, povm, label);
}

void write_frequencies_csv(std::ostream& os, const FrequencyData& data) {
  os << "# schema=qdt.frequencies.v1 seed=" << data.seed << " stream=" << data.stream << '\n';
  os << "i,j,freq,shots,seed\n";
  for (Eigen::Index j = 0; j < data.freqs.cols(); ++j) {
    for (Eigen::Index i = 0; i < data.freqs.rows(); ++i) {
      os << i << ',' << j << ',' << format_double(data.freqs(i, j)) << ','
         << (data.exact ? std::string("inf") : std::to_string(data.shots[static_cast<std::size_t>(j)])) << ','
         << data.seed << '\n';
    }
  }
}

void write_superposition_csv(std::ostream& os, const CoherentSuperposition& sup, std::uint64_t seed) {
  os << "# schema=qdt.superposition.v1 seed=" << seed << " dim=" << sup.dim << '\n';
  os << "k,Re(c),Im(c),Re(alpha),Im(alpha)\n";
  for (std::size_t k = 0; k < sup.terms.size(); ++k) {
    const auto& t = sup.terms[k];
    os << k << ',' << format_double(t.c.real()) << ',' << format_double(t.c.imag()) << ','
       << format_double(t.alpha.real()) << ',' << format_double(t.alpha.imag()) << '\n';
  }
}

void write_superposition_set_csv(std::ostream& os, const SuperposedSet& set, std::uint64_t seed) {
  os << "# schema=qdt.superposition-set.v1 seed=" << seed << " dim=" << set.set.dim() << '\n';
  os << "state,k,Re(c),Im(c),Re(alpha),Im(alpha)\n";
  for (std::size_t j = 0; j < set.terms.size(); ++j) {
    const auto& sup = set.terms[j].sup;
    for (std::size_t k = 0; k < sup.terms.size(); ++k) {
      const auto& t = sup.terms[k];
      os << j << ',' << k << ',' << format_double(t.c.real()) << ',' << format_double(t.c.imag()) << ','
         << format_double(t.alpha.real()) << ',' << format_double(t.alpha.imag()) << '\n';
    }
  }
}

void write_record_csv(std::ostream& os, const ExperimentRecord& rec) {
  os << "# schema=qdt.record.v1 seed=" << rec.seed;
  if (rec.stream) os << " stream=" << *rec.stream;
  os << " protocol=" << rec.protocol << " reps=" << rec.reps << '\n';
  os << "N,rep,element,infidelity,mse\n";
  for (const auto& r : rec.rows) {
    os << r.shots << ',' << r.rep << ',' << (r.element + 1) << ',' << format_double(r.infidelity) << ','
       << format_double(r.mse) << '\n';
  }
}

std::vector<ExperimentRow> read_record_csv(std::istream& is) {
  std::vector<ExperimentRow> rows;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line.rfind("N,rep,element,infidelity", 0) != 0 && line.rfind("N,detector,element,mean_infidelity", 0) != 0) {
        io_error(lineno, "expected header 'N,rep,element,infidelity,...'");
      }
      header = true;
      continue;
    }
    std::istringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 4) io_error(lineno, "expected at least 4 columns");
    try {
      ExperimentRow r{};
      r.shots = std::stoull(cells[0]);
      r.rep = std::stoi(cells[1]);
      r.element = std::stoi(cells[2]) - 1;
      r.infidelity = std::stod(cells[3]);
      r.mse = cells.size() > 4 ? std::stod(cells[4]) : 0.0;
      rows.push_back(r);
    } catch (const std::exception&) {
      io_error(lineno, "malformed number");
    }
  }
  if (!header) io_error(lineno, "no header row");
  return rows;
}

}  // namespace qdt
