#include "sketchls/bundle.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include <json.hpp>

namespace sketchls {

namespace detail {

namespace {
constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int decode_char(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64_encode(const unsigned char* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 3 <= len; i += 3) {
    const unsigned v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (i + 1 == len) {
    const unsigned v = data[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == len) {
    const unsigned v = (data[i] << 16) | (data[i + 1] << 8);
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

std::string base64_decode(const std::string& text) {
  if (text.size() % 4 != 0) throw std::runtime_error("base64 length not a multiple of 4");
  std::string out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) throw std::runtime_error("bad base64 padding");
        vals[k] = 0;
        ++pad;
      } else {
        if (pad > 0) throw std::runtime_error("bad base64 padding");
        vals[k] = decode_char(c);
        if (vals[k] < 0) throw std::runtime_error("bad base64 character");
      }
    }
    const unsigned v = (vals[0] << 18) | (vals[1] << 12) | (vals[2] << 6) | vals[3];
    out += static_cast<char>((v >> 16) & 0xff);
    if (pad < 2) out += static_cast<char>((v >> 8) & 0xff);
    if (pad < 1) out += static_cast<char>(v & 0xff);
  }
  return out;
}

}  // namespace detail

namespace {

using nlohmann::json;

// Matrices travel as base64 of little-endian float64, row-major.
json encode_matrix(const Matrix& M) {
  const std::size_t count = static_cast<std::size_t>(M.size());
  std::vector<unsigned char> buf(count * 8);
  std::size_t k = 0;
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      double v = M(i, j);
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap64(bits);
      }
      std::memcpy(buf.data() + k * 8, &bits, 8);
      ++k;
    }
  }
  return json{{"rows", M.rows()},
              {"cols", M.cols()},
              {"data", detail::base64_encode(buf.data(), buf.size())}};
}

Matrix decode_matrix(const json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  if (rows < 0 || cols < 0) throw std::runtime_error("negative matrix dimension");
  const std::string raw = detail::base64_decode(j.at("data").get<std::string>());
  if (raw.size() != static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) * 8) {
    throw std::runtime_error("matrix payload size mismatch");
  }
  Matrix M(rows, cols);
  std::size_t k = 0;
  for (Index i = 0; i < rows; ++i) {
    for (Index j2 = 0; j2 < cols; ++j2) {
      std::uint64_t bits;
      std::memcpy(&bits, raw.data() + k * 8, 8);
      if constexpr (std::endian::native == std::endian::big) {
        bits = __builtin_bswap64(bits);
      }
      double v;
      std::memcpy(&v, &bits, 8);
      M(i, j2) = v;
      ++k;
    }
  }
  return M;
}

const char* kind_name(ConstraintKind k) {
  switch (k) {
    case ConstraintKind::Unconstrained: return "unconstrained";
    case ConstraintKind::L1Ball: return "l1";
    case ConstraintKind::TransformedL1Ball: return "transformed_l1";
    case ConstraintKind::NuclearBall: return "nuclear";
  }
  return "unconstrained";
}

ConstraintKind kind_from_name(const std::string& name) {
  if (name == "unconstrained") return ConstraintKind::Unconstrained;
  if (name == "l1") return ConstraintKind::L1Ball;
  if (name == "transformed_l1") return ConstraintKind::TransformedL1Ball;
  if (name == "nuclear") return ConstraintKind::NuclearBall;
  throw std::runtime_error("unknown constraint kind: " + name);
}

}  // namespace

void save_bundle(const std::string& path, const Bundle& bundle) {
  bundle.problem.check();
  json j;
  j["format"] = "sketchls-bundle";
  j["version"] = 1;
  j["seed"] = bundle.seed;
  j["source"] = bundle.source;
  j["A"] = encode_matrix(bundle.problem.A);
  j["y"] = encode_matrix(bundle.problem.y);

  json jc;
  jc["kind"] = kind_name(bundle.problem.constraint.kind);
  if (bundle.problem.constraint.kind != ConstraintKind::Unconstrained) {
    jc["radius"] = bundle.problem.constraint.radius;
  }
  if (bundle.problem.constraint.kind == ConstraintKind::TransformedL1Ball) {
    jc["phi"] = encode_matrix(bundle.problem.constraint.phi);
  }
  if (bundle.problem.constraint.kind == ConstraintKind::NuclearBall) {
    jc["var_rows"] = bundle.problem.constraint.var_rows;
    jc["var_cols"] = bundle.problem.constraint.var_cols;
  }
  j["constraint"] = jc;

  json jo;
  jo["x_star"] = encode_matrix(bundle.oracle.x_star);
  jo["f_star"] = bundle.oracle.f_star;
  jo["method"] = bundle.oracle.method == OracleMethod::NormalEquations
                     ? "normal_equations"
                     : "long_run_acc_pgd";
  jo["certificate"] = bundle.oracle.certificate;
  j["oracle"] = jo;

  if (bundle.x_gt) j["x_gt"] = encode_matrix(*bundle.x_gt);

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::runtime_error("write failed for " + path);
}

Bundle load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;

  if (j.value("format", std::string()) != "sketchls-bundle") {
    throw std::runtime_error(path + " is not a problem bundle");
  }
  if (j.at("version").get<int>() != 1) {
    throw std::runtime_error("unsupported bundle version");
  }

  Bundle b;
  b.seed = j.value("seed", std::uint64_t{0});
  b.source = j.value("source", std::string());
  b.problem.A = decode_matrix(j.at("A"));
  b.problem.y = decode_matrix(j.at("y"));

  const json& jc = j.at("constraint");
  const ConstraintKind kind = kind_from_name(jc.at("kind").get<std::string>());
  switch (kind) {
    case ConstraintKind::Unconstrained:
      b.problem.constraint = ConstraintSet::unconstrained();
      break;
    case ConstraintKind::L1Ball:
      b.problem.constraint = ConstraintSet::l1_ball(jc.at("radius").get<double>());
      break;
    case ConstraintKind::TransformedL1Ball:
      b.problem.constraint = ConstraintSet::transformed_l1_ball(
          decode_matrix(jc.at("phi")), jc.at("radius").get<double>());
      break;
    case ConstraintKind::NuclearBall:
      b.problem.constraint = ConstraintSet::nuclear_ball(
          jc.at("radius").get<double>(), jc.at("var_rows").get<Index>(),
          jc.at("var_cols").get<Index>());
      break;
  }

  const json& jo = j.at("oracle");
  b.oracle.x_star = decode_matrix(jo.at("x_star"));
  b.oracle.f_star = jo.at("f_star").get<double>();
  const std::string method = jo.at("method").get<std::string>();
  if (method == "normal_equations") {
    b.oracle.method = OracleMethod::NormalEquations;
  } else if (method == "long_run_acc_pgd") {
    b.oracle.method = OracleMethod::LongRunAccPGD;
  } else {
    throw std::runtime_error("unknown oracle method: " + method);
  }
  b.oracle.certificate = jo.value("certificate", 0.0);

  if (j.contains("x_gt")) b.x_gt = decode_matrix(j.at("x_gt"));

  b.problem.check();
  return b;
}

}  // namespace sketchls
