#include "gqte/archive.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace gqte {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr const char* kArchiveKind = "gqte-draws";

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, const char* what) {
  if (!rows.is_array()) throw InputError(std::string("archive: ") + what + " must be an array");
  const auto nr = static_cast<Eigen::Index>(rows.size());
  Eigen::Index nc = -1;
  Eigen::MatrixXd m;
  for (Eigen::Index r = 0; r < nr; ++r) {
    const json& row = rows[static_cast<std::size_t>(r)];
    if (!row.is_array()) throw InputError(std::string("archive: ragged ") + what + " matrix");
    if (nc < 0) {
      nc = static_cast<Eigen::Index>(row.size());
      m.resize(nr, nc);
    } else if (static_cast<Eigen::Index>(row.size()) != nc) {
      throw InputError(std::string("archive: ragged ") + what + " matrix");
    }
    for (Eigen::Index c = 0; c < nc; ++c) m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
  }
  if (nr == 0) m.resize(0, 0);
  return m;
}

json vector_to_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

std::vector<double> vector_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) throw InputError(std::string("archive: ") + what + " must be an array");
  std::vector<double> out;
  out.reserve(arr.size());
  for (const auto& x : arr) out.push_back(x.get<double>());
  return out;
}

const json& field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw InputError(std::string("archive: missing field '") + key + "'");
  return *it;
}

SmootherBasis basis_from_json(const json& b) {
  const auto family = SmootherBasis::family_from_name(field(b, "family").get<std::string>());
  const int df = field(b, "df").get<int>();
  if (family == SmootherBasis::Family::NaturalSpline) {
    return SmootherBasis::natural_spline_with_knots(vector_from_json(field(b, "knots"), "knots"));
  }
  return SmootherBasis::make(family, df);
}

}  // namespace

std::string archive_to_json(const DrawArchive& archive) {
  json j;
  j["format_version"] = kFormatVersion;
  j["kind"] = kArchiveKind;
  j["f1"] = {{"family", archive.f1.name()}, {"params", vector_to_json(archive.f1.params())}};
  j["link"] = archive.link.name();
  j["basis"] = {{"family", SmootherBasis::family_name(archive.basis.family())},
                {"df", archive.basis.df()},
                {"knots", vector_to_json(archive.basis.knots())}};
  j["df_auto"] = archive.df_auto;
  j["data"] = {{"y1", vector_to_json(archive.y1)}, {"y2", vector_to_json(archive.y2)}};
  json prior_mean = json::array();
  for (Eigen::Index i = 0; i < archive.prior_mean.size(); ++i) prior_mean.push_back(archive.prior_mean[i]);
  j["prior"] = {{"beta_mean", std::move(prior_mean)},
                {"variance_scale", archive.prior_variance_scale}};
  const SamplerConfig& c = archive.draws.config;
  j["config"] = {{"iterations", c.iterations},
                 {"burnin", c.burnin},
                 {"thin", c.thin},
                 {"proposal_df", c.proposal_df},
                 {"seed", c.seed}};
  json acceptance = json::array();
  for (const BlockStat& s : archive.draws.acceptance) {
    acceptance.push_back(
        {{"block", s.name}, {"proposals", s.proposals}, {"accepted", s.accepted}});
  }
  j["acceptance"] = std::move(acceptance);
  j["degenerate"] = archive.draws.degenerate;
  j["draws"] = {{"beta", matrix_to_json(archive.draws.beta)},
                {"eta", matrix_to_json(archive.draws.eta)},
                {"eta_names", archive.draws.eta_names}};
  return j.dump();
}

DrawArchive archive_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("archive: not valid JSON: ") + e.what());
  }
  if (!j.is_object() || field(j, "kind").get<std::string>() != kArchiveKind) {
    throw InputError("archive: not a draws archive");
  }
  if (field(j, "format_version").get<int>() != kFormatVersion) {
    throw InputError("archive: unsupported format version");
  }

  const json& f1j = field(j, "f1");
  const CaseDensity f1 = CaseDensity::from_params(
      CaseDensity::kind_from_name(field(f1j, "family").get<std::string>()),
      vector_from_json(field(f1j, "params"), "f1 params"));
  const LinkFunction link = LinkFunction::from_name(field(j, "link").get<std::string>());

  DrawArchive archive(f1, link, basis_from_json(field(j, "basis")));
  archive.df_auto = field(j, "df_auto").get<bool>();
  const json& data = field(j, "data");
  archive.y1 = vector_from_json(field(data, "y1"), "y1");
  archive.y2 = vector_from_json(field(data, "y2"), "y2");

  const json& prior = field(j, "prior");
  const std::vector<double> pm = vector_from_json(field(prior, "beta_mean"), "beta_mean");
  archive.prior_mean.resize(static_cast<Eigen::Index>(pm.size()));
  for (std::size_t i = 0; i < pm.size(); ++i) archive.prior_mean[static_cast<Eigen::Index>(i)] = pm[i];
  archive.prior_variance_scale = field(prior, "variance_scale").get<double>();

  const json& config = field(j, "config");
  archive.draws.config.iterations = field(config, "iterations").get<int>();
  archive.draws.config.burnin = field(config, "burnin").get<int>();
  archive.draws.config.thin = field(config, "thin").get<int>();
  archive.draws.config.proposal_df = field(config, "proposal_df").get<double>();
  archive.draws.config.seed = field(config, "seed").get<std::uint64_t>();

  for (const json& s : field(j, "acceptance")) {
    BlockStat stat;
    stat.name = field(s, "block").get<std::string>();
    stat.proposals = field(s, "proposals").get<std::int64_t>();
    stat.accepted = field(s, "accepted").get<std::int64_t>();
    archive.draws.acceptance.push_back(std::move(stat));
  }
  archive.draws.degenerate = field(j, "degenerate").get<bool>();

  const json& draws = field(j, "draws");
  archive.draws.beta = matrix_from_json(field(draws, "beta"), "beta");
  archive.draws.eta = matrix_from_json(field(draws, "eta"), "eta");
  archive.draws.eta_names = field(draws, "eta_names").get<std::vector<std::string>>();
  if (archive.draws.beta.rows() != archive.draws.eta.rows()) {
    throw InputError("archive: beta and eta draw counts disagree");
  }
  if (archive.draws.eta_names.size() != static_cast<std::size_t>(archive.draws.eta.cols())) {
    throw InputError("archive: eta names do not match the eta draw width");
  }
  return archive;
}

void write_archive(const DrawArchive& archive, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("archive: cannot open '" + path + "' for writing");
  const std::string text = archive_to_json(archive);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.put('\n');
  if (!out) throw InputError("archive: failed writing '" + path + "'");
}

DrawArchive read_archive(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("archive: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return archive_from_json(buf.str());
}

}  // namespace gqte
