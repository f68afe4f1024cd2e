#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gqte/model.hpp"
#include "gqte/sampler.hpp"

namespace gqte {

// Everything a fit produces, in one self-describing file: the model, the
// data it saw, the sampler settings, and the retained draws. Reports are
// computed from this alone, so no functional evaluation needs a re-run of
// the chain.
struct DrawArchive {
  DrawArchive(CaseDensity f1, LinkFunction link, SmootherBasis basis)
      : f1(std::move(f1)), link(link), basis(std::move(basis)) {}

  CaseDensity f1;       // chain-start density for sample 1 (family + parameters)
  LinkFunction link;
  SmootherBasis basis;
  bool df_auto = false;  // whether the degrees of freedom were selected, not given
  std::vector<double> y1;  // sorted samples, echoed for functional evaluation
  std::vector<double> y2;
  Eigen::VectorXd prior_mean;
  double prior_variance_scale = 100.0;
  PosteriorDraws draws;  // retained matrices, acceptance stats, sampler config

  ModelSpec spec() const { return ModelSpec(f1, link, basis); }
  TwoSampleData data() const { return TwoSampleData(y1, y2); }
};

// Serialization is exact: doubles survive a write/read cycle bit for bit,
// and write-read-write produces identical bytes.
std::string archive_to_json(const DrawArchive& archive);
DrawArchive archive_from_json(const std::string& text);

void write_archive(const DrawArchive& archive, const std::string& path);
DrawArchive read_archive(const std::string& path);

}  // namespace gqte
