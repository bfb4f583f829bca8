#include "freeway/nn/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

#include "freeway/errors.hpp"

namespace freeway::nn {
namespace {

constexpr const char* kFormatName = "qnetparams";
constexpr int kFormatVersion = 1;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

const char* act_name(Activation a) { return a == Activation::kRelu ? "relu" : "linear"; }

Activation act_from(const std::string& s, int line_no) {
  if (s == "relu") return Activation::kRelu;
  if (s == "linear") return Activation::kLinear;
  throw ParamsFormatError("line " + std::to_string(line_no) + ": unknown activation '" + s + "'");
}

std::string group_descriptor(const std::vector<DenseLayer>& group) {
  std::string out;
  for (size_t i = 0; i < group.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(group[i].in_dim()) + ':' + std::to_string(group[i].out_dim()) + ':' +
           act_name(group[i].activation);
  }
  return out;
}

void append_group(std::string& out, const std::string& prefix,
                  const std::vector<DenseLayer>& group) {
  for (size_t i = 0; i < group.size(); ++i) {
    const DenseLayer& layer = group[i];
    out += prefix + 'W' + std::to_string(i) + ' ' + std::to_string(layer.weights.rows()) + ' ' +
           std::to_string(layer.weights.cols());
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c)
        out += ' ' + fmt_double(layer.weights(r, c));
    out += '\n';
    out += prefix + 'b' + std::to_string(i) + ' ' + std::to_string(layer.biases.size()) + " 1";
    for (Eigen::Index r = 0; r < layer.biases.size(); ++r)
      out += ' ' + fmt_double(layer.biases(r));
    out += '\n';
  }
}

class LineReader {
 public:
  explicit LineReader(const std::string& text) : in_(text) {}

  // Returns false at end of input.
  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    return true;
  }

  std::string require(const char* what) {
    std::string line;
    if (!next(line))
      throw ParamsFormatError("line " + std::to_string(line_no_ + 1) + ": truncated file, expected " +
                              what);
    return line;
  }

  int line_no() const { return line_no_; }

 private:
  std::istringstream in_;
  int line_no_ = 0;
};

std::vector<LayerSpec> parse_descriptor(const std::string& line, const std::string& keyword,
                                        int line_no) {
  std::istringstream in(line);
  std::string word;
  in >> word;
  if (word != keyword)
    throw ParamsFormatError("line " + std::to_string(line_no) + ": expected '" + keyword +
                            "' descriptor, got '" + word + "'");
  std::vector<LayerSpec> specs;
  while (in >> word) {
    LayerSpec spec;
    char colon1 = 0, colon2 = 0;
    std::string act;
    std::istringstream item(word);
    if (!(item >> spec.in_dim >> colon1 >> spec.out_dim >> colon2) || colon1 != ':' || colon2 != ':' ||
        !std::getline(item, act) || spec.in_dim < 1 || spec.out_dim < 1)
      throw ParamsFormatError("line " + std::to_string(line_no) + ": malformed layer spec '" +
                              word + "'");
    spec.activation = act_from(act, line_no);
    specs.push_back(spec);
  }
  if (specs.empty())
    throw ParamsFormatError("line " + std::to_string(line_no) + ": empty '" + keyword +
                            "' descriptor");
  return specs;
}

std::vector<DenseLayer> read_group(LineReader& reader, const std::string& prefix,
                                   const std::vector<LayerSpec>& specs) {
  std::vector<DenseLayer> group;
  for (size_t i = 0; i < specs.size(); ++i) {
    DenseLayer layer;
    layer.activation = specs[i].activation;
    for (int which = 0; which < 2; ++which) {
      const std::string expected =
          prefix + (which == 0 ? 'W' : 'b') + std::to_string(i);
      const std::string line = reader.require(("matrix line '" + expected + "'").c_str());
      const int line_no = reader.line_no();
      std::istringstream in(line);
      std::string name;
      Eigen::Index rows = 0, cols = 0;
      if (!(in >> name >> rows >> cols))
        throw ParamsFormatError("line " + std::to_string(line_no) + ": malformed matrix line");
      if (name != expected)
        throw ParamsFormatError("line " + std::to_string(line_no) + ": expected matrix '" +
                                expected + "', got '" + name + "'");
      const Eigen::Index want_rows = specs[i].out_dim;
      const Eigen::Index want_cols = which == 0 ? specs[i].in_dim : 1;
      if (rows != want_rows || cols != want_cols)
        throw ParamsFormatError("line " + std::to_string(line_no) + ": matrix '" + expected +
                                "' has shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                                ", expected " + std::to_string(want_rows) + "x" +
                                std::to_string(want_cols));
      Matrix m(rows, cols);
      std::string tok;
      for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) {
          if (!(in >> tok))
            throw ParamsFormatError("line " + std::to_string(line_no) + ": matrix '" + expected +
                                    "' is missing entries");
          char* end = nullptr;
          const double v = std::strtod(tok.c_str(), &end);
          if (end == tok.c_str() || *end != '\0' || !std::isfinite(v))
            throw ParamsFormatError("line " + std::to_string(line_no) + ": bad entry '" + tok +
                                    "' in matrix '" + expected + "'");
          m(r, c) = v;
        }
      }
      if (in >> tok)
        throw ParamsFormatError("line " + std::to_string(line_no) + ": matrix '" + expected +
                                "' has trailing entries");
      if (which == 0)
        layer.weights = std::move(m);
      else
        layer.biases = m.col(0);
    }
    group.push_back(std::move(layer));
  }
  return group;
}

}  // namespace

std::string serialize_params(const QNetwork& net) {
  std::string out = std::string(kFormatName) + ' ' + std::to_string(kFormatVersion) + '\n';
  if (net.arch == Architecture::kPlain) {
    out += "arch plain\n";
    out += "layers " + group_descriptor(net.layers) + '\n';
    append_group(out, "", net.layers);
  } else {
    out += "arch dueling\n";
    out += "trunk " + group_descriptor(net.trunk) + '\n';
    out += "value " + group_descriptor(net.value) + '\n';
    out += "advantage " + group_descriptor(net.advantage) + '\n';
    append_group(out, "trunk.", net.trunk);
    append_group(out, "value.", net.value);
    append_group(out, "advantage.", net.advantage);
  }
  return out;
}

QNetwork parse_params(const std::string& text) {
  LineReader reader(text);

  const std::string header = reader.require("format header");
  {
    std::istringstream in(header);
    std::string name;
    int version = -1;
    if (!(in >> name >> version) || name != kFormatName)
      throw ParamsFormatError("line 1: not a " + std::string(kFormatName) + " file");
    if (version != kFormatVersion)
      throw ParamsFormatError("line 1: unsupported version " + std::to_string(version) +
                              ", expected " + std::to_string(kFormatVersion));
  }

  const std::string arch_line = reader.require("architecture line");
  std::string arch;
  {
    std::istringstream in(arch_line);
    std::string word;
    if (!(in >> word >> arch) || word != "arch" || (arch != "plain" && arch != "dueling"))
      throw ParamsFormatError("line 2: expected 'arch plain' or 'arch dueling'");
  }

  QNetwork net;
  if (arch == "plain") {
    net.arch = Architecture::kPlain;
    const std::string desc = reader.require("'layers' descriptor");
    const auto specs = parse_descriptor(desc, "layers", reader.line_no());
    net.layers = read_group(reader, "", specs);
  } else {
    net.arch = Architecture::kDueling;
    const auto trunk = parse_descriptor(reader.require("'trunk' descriptor"), "trunk", reader.line_no());
    const auto value = parse_descriptor(reader.require("'value' descriptor"), "value", reader.line_no());
    const auto adv =
        parse_descriptor(reader.require("'advantage' descriptor"), "advantage", reader.line_no());
    net.trunk = read_group(reader, "trunk.", trunk);
    net.value = read_group(reader, "value.", value);
    net.advantage = read_group(reader, "advantage.", adv);
  }

  std::string extra;
  while (reader.next(extra)) {
    if (!extra.empty())
      throw ParamsFormatError("line " + std::to_string(reader.line_no()) + ": trailing content");
  }
  return net;
}

void save_params(const QNetwork& net, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParamsFormatError("cannot open '" + path + "' for writing");
  const std::string text = serialize_params(net);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ParamsFormatError("failed writing '" + path + "'");
}

QNetwork load_params(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParamsFormatError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_params(buf.str());
}

std::string describe_architecture(const QNetwork& net) {
  if (net.arch == Architecture::kPlain) return "plain " + group_descriptor(net.layers);
  return "dueling trunk[" + group_descriptor(net.trunk) + "] value[" + group_descriptor(net.value) +
         "] advantage[" + group_descriptor(net.advantage) + "]";
}

}  // namespace freeway::nn
