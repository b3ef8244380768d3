#include "cointvar/model_io.hpp"

#include "cointvar/error.hpp"
#include "format.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace cointvar {

namespace {

void put_matrix(std::ostream& out, const std::string& name, const Matrix& m) {
  out << "matrix " << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  if (m.cols() == 0) return;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ' ';
      out << detail::format_double(m(i, j));
    }
    out << '\n';
  }
}

void put_header(std::ostream& out, const char* kind, Eigen::Index d, int p, DeterministicSpec det,
                std::optional<int> rank) {
  out << "cointvar-model 1\n";
  out << "kind " << kind << '\n';
  out << "d " << d << '\n';
  out << "p " << p << '\n';
  if (rank) out << "rank " << *rank << '\n';
  out << "det " << to_string(det) << '\n';
}

void put_var_body(std::ostream& out, const VarModel& model) {
  for (int k = 0; k < model.p(); ++k) {
    put_matrix(out, "phi_" + std::to_string(k + 1), model.phi[static_cast<std::size_t>(k)]);
  }
  put_matrix(out, "psi", model.psi);
  put_matrix(out, "resid_cov", model.resid_cov);
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  std::istringstream next_line() {
    std::string line;
    if (!std::getline(in_, line)) fail("unexpected end of model file");
    ++line_;
    return std::istringstream(line);
  }

  std::string expect_key(const std::string& key) {
    auto ls = next_line();
    std::string k, value;
    ls >> k >> value;
    if (k != key || value.empty()) fail("expected '" + key + " <value>'");
    return value;
  }

  long expect_int(const std::string& key) {
    const std::string v = expect_key(key);
    try {
      std::size_t used = 0;
      const long out = std::stol(v, &used);
      if (used != v.size()) throw std::invalid_argument(v);
      return out;
    } catch (const std::exception&) {
      fail("bad integer for '" + key + "'");
    }
  }

  Matrix expect_matrix(const std::string& name, Eigen::Index rows, Eigen::Index cols) {
    auto ls = next_line();
    std::string tag, n;
    Eigen::Index r = -1, c = -1;
    ls >> tag >> n >> r >> c;
    if (tag != "matrix" || n != name || r != rows || c != cols) {
      fail("expected 'matrix " + name + " " + std::to_string(rows) + " " + std::to_string(cols) + "'");
    }
    Matrix m(rows, cols);
    if (cols == 0) return m;
    for (Eigen::Index i = 0; i < rows; ++i) {
      auto row = next_line();
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = number(row);
      std::string extra;
      if (row >> extra) fail("too many values in matrix row");
    }
    return m;
  }

  std::vector<double> expect_vector(const std::string& name) {
    auto ls = next_line();
    std::string tag, n;
    long size = -1;
    ls >> tag >> n >> size;
    if (tag != "vector" || n != name || size < 0) fail("expected 'vector " + name + " <n>'");
    std::vector<double> v;
    if (size == 0) return v;
    auto row = next_line();
    for (long i = 0; i < size; ++i) v.push_back(number(row));
    return v;
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line_); }

 private:
  double number(std::istringstream& row) {
    std::string token;
    if (!(row >> token)) fail("too few values in matrix row");
    try {
      std::size_t used = 0;
      const double v = std::stod(token, &used);
      if (used != token.size()) throw std::invalid_argument(token);
      return v;
    } catch (const std::exception&) {
      fail("bad number '" + token + "'");
    }
  }

  std::istream& in_;
  std::size_t line_ = 0;
};

}  // namespace

void write_model(std::ostream& out, const VarModel& model) {
  put_header(out, "var", model.dim(), model.p(), model.det, std::nullopt);
  put_var_body(out, model);
  out << "end\n";
}

void write_model(std::ostream& out, const VecmModel& model) {
  put_header(out, "vecm", model.dim(), model.p, model.det, model.rank);
  put_var_body(out, vecm_to_var(model));
  put_matrix(out, "alpha", model.alpha);
  put_matrix(out, "beta", model.beta);
  for (int k = 0; k < model.p - 1; ++k) {
    put_matrix(out, "gamma_" + std::to_string(k + 1), model.gamma[static_cast<std::size_t>(k)]);
  }
  out << "vector eigenvalues " << model.eigenvalues.size() << '\n';
  if (!model.eigenvalues.empty()) {
    for (std::size_t i = 0; i < model.eigenvalues.size(); ++i) {
      if (i > 0) out << ' ';
      out << detail::format_double(model.eigenvalues[i]);
    }
    out << '\n';
  }
  out << "end\n";
}

void write_model(const std::filesystem::path& path, const ModelFile& model) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  if (model.kind == ModelFile::Kind::kVecm && model.vecm) {
    write_model(out, *model.vecm);
  } else {
    write_model(out, model.var);
  }
}

ModelFile read_model(std::istream& in) {
  Reader reader(in);
  if (reader.expect_key("cointvar-model") != "1") reader.fail("unsupported model file version");
  ModelFile file;
  const std::string kind = reader.expect_key("kind");
  if (kind == "var") {
    file.kind = ModelFile::Kind::kVar;
  } else if (kind == "vecm") {
    file.kind = ModelFile::Kind::kVecm;
  } else {
    reader.fail("unknown model kind '" + kind + "'");
  }
  const long d = reader.expect_int("d");
  const long p = reader.expect_int("p");
  if (d < 1 || p < 1) reader.fail("d and p must be positive");
  long rank = d;
  if (file.kind == ModelFile::Kind::kVecm) {
    rank = reader.expect_int("rank");
    if (rank < 0 || rank > d) reader.fail("rank outside [0, d]");
  }
  DeterministicSpec det;
  try {
    det = parse_deterministic(reader.expect_key("det"));
  } catch (const Error& e) {
    reader.fail(e.what());
  }

  VarModel& var = file.var;
  var.det = det;
  for (long k = 1; k <= p; ++k) var.phi.push_back(reader.expect_matrix("phi_" + std::to_string(k), d, d));
  var.psi = reader.expect_matrix("psi", d, det.columns());
  var.resid_cov = reader.expect_matrix("resid_cov", d, d);

  if (file.kind == ModelFile::Kind::kVecm) {
    VecmModel vecm;
    vecm.det = det;
    vecm.p = static_cast<int>(p);
    vecm.rank = static_cast<int>(rank);
    vecm.psi = var.psi;
    vecm.resid_cov = var.resid_cov;
    vecm.alpha = reader.expect_matrix("alpha", d, rank);
    vecm.beta = reader.expect_matrix("beta", d, rank);
    for (long k = 1; k < p; ++k) vecm.gamma.push_back(reader.expect_matrix("gamma_" + std::to_string(k), d, d));
    vecm.eigenvalues = reader.expect_vector("eigenvalues");
    file.vecm = std::move(vecm);
  }
  auto tail = reader.next_line();
  std::string end;
  tail >> end;
  if (end != "end") reader.fail("expected 'end'");
  return file;
}

ModelFile read_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  return read_model(in);
}

}  // namespace cointvar
