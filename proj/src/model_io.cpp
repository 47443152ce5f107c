#include <fstream>
#include <sstream>

#include "sentcast/csv.hpp"
#include "sentcast/error.hpp"
#include "sentcast/neuralnet.hpp"

namespace sentcast {

namespace {
constexpr const char* kMagic = "sentcast-model";
constexpr int kFormatVersion = 1;
}  // namespace

// Format (text, whitespace separated):
//   sentcast-model 1
//   hidden_units <int> / lookback <int> / n_features <int> / output_head <name>
//   bins <int> / seed <uint> / features <comma list or '-'>
//   tensor <name> <rows> <cols> followed by rows*cols values, column-major
//   end
void save_model(const BiLstmModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  const auto& c = model.config;
  out << kMagic << ' ' << kFormatVersion << '\n'
      << "hidden_units " << c.hidden_units << '\n'
      << "lookback " << c.lookback << '\n'
      << "n_features " << c.n_features << '\n'
      << "output_head " << to_string(c.head) << '\n'
      << "bins " << c.bins << '\n'
      << "seed " << c.seed << '\n'
      << "features ";
  if (model.feature_columns.empty()) out << '-';
  for (std::size_t i = 0; i < model.feature_columns.size(); ++i)
    out << (i ? "," : "") << model.feature_columns[i];
  out << '\n';
  model.params.for_each(Parameters::ConstVisitor(
      [&](std::string_view name, const double* d, Eigen::Index r, Eigen::Index cols) {
        out << "tensor " << name << ' ' << r << ' ' << cols << '\n';
        for (Eigen::Index k = 0; k < r * cols; ++k)
          out << csv::format_double(d[k]) << ((k + 1) % 8 == 0 || k + 1 == r * cols ? '\n' : ' ');
      }));
  out << "end\n";
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

BiLstmModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  auto fail = [&](const std::string& why) { return Error(ErrorCode::InvalidModelFile, path + ": " + why); };

  std::string magic;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) throw fail("bad magic");
  if (version != kFormatVersion) throw fail("unsupported version " + std::to_string(version));

  ModelConfig cfg;
  std::string key, head, features;
  if (!(in >> key >> cfg.hidden_units) || key != "hidden_units") throw fail("hidden_units");
  if (!(in >> key >> cfg.lookback) || key != "lookback") throw fail("lookback");
  if (!(in >> key >> cfg.n_features) || key != "n_features") throw fail("n_features");
  if (!(in >> key >> head) || key != "output_head") throw fail("output_head");
  cfg.head = parse_output_head(head);
  if (!(in >> key >> cfg.bins) || key != "bins") throw fail("bins");
  if (!(in >> key >> cfg.seed) || key != "seed") throw fail("seed");
  if (!(in >> key >> features) || key != "features") throw fail("features");

  BiLstmModel model = init_model(cfg);
  if (features != "-") {
    std::stringstream ss(features);
    std::string col;
    while (std::getline(ss, col, ',')) model.feature_columns.push_back(col);
  }
  model.params.for_each(Parameters::Visitor(
      [&](std::string_view name, double* d, Eigen::Index r, Eigen::Index cols) {
        std::string tag, got_name;
        Eigen::Index got_r = 0, got_c = 0;
        if (!(in >> tag >> got_name >> got_r >> got_c) || tag != "tensor")
          throw fail("expected tensor " + std::string(name));
        if (got_name != name || got_r != r || got_c != cols)
          throw fail("tensor " + got_name + " does not match config");
        for (Eigen::Index k = 0; k < r * cols; ++k) {
          std::string tok;
          if (!(in >> tok) || !csv::parse_double(tok, d[k])) throw fail("bad value in " + got_name);
        }
      }));
  if (!(in >> key) || key != "end") throw fail("missing end marker");
  if (!model.params.all_finite()) throw fail("non-finite parameter");
  return model;
}

}  // namespace sentcast
