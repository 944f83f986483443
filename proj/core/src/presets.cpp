#include "surq/presets.hpp"

#include "surq/config.hpp"

namespace surq {

namespace {

// Correlated Gaussian input centered in the unit cube: variance 0.1 per
// coordinate with covariance 0.05 between any two.
InputDistribution centered_gaussian(int dim) {
  Eigen::VectorXd mean = Eigen::VectorXd::Constant(dim, 0.5);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(dim, dim, 0.05);
  cov.diagonal().array() = 0.1;
  return make_gaussian(std::move(mean), std::move(cov));
}

SurConfig sampled_search_config(double alpha) {
  SurConfig c;
  c.n_initial = 30;
  c.n_total = 90;
  c.cloud_size = 3000;
  c.alpha = alpha;
  c.renew_cloud = true;
  c.search_on_cloud = false;
  c.pool_size = 100000;
  c.shortlist = 300;
  c.local_refine = true;
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"branin-2d-a85", "hartman-4d-a05", "hartman-4d-a97", "ackley-6d-a15",
          "ackley-6d-a97"};
}

Preset make_preset(const std::string& name) {
  Preset p;
  p.name = name;
  if (name == "branin-2d-a85") {
    p.fn = branin2();
    p.dist = unit_box(2);
    SurConfig c;
    c.n_initial = 7;
    c.n_total = 18;
    c.cloud_size = 1000;
    c.alpha = 0.85;
    c.renew_cloud = false;
    c.search_on_cloud = true;
    c.local_refine = false;
    p.config = c;
  } else if (name == "hartman-4d-a05") {
    p.fn = hartman4();
    p.dist = centered_gaussian(4);
    p.config = sampled_search_config(0.05);
  } else if (name == "hartman-4d-a97") {
    p.fn = hartman4();
    p.dist = centered_gaussian(4);
    p.config = sampled_search_config(0.97);
  } else if (name == "ackley-6d-a15") {
    p.fn = ackley(6);
    p.dist = centered_gaussian(6);
    p.config = sampled_search_config(0.15);
  } else if (name == "ackley-6d-a97") {
    p.fn = ackley(6);
    p.dist = centered_gaussian(6);
    p.config = sampled_search_config(0.97);
  } else {
    throw ConfigError("unknown preset '" + name + "'");
  }
  return p;
}

}  // namespace surq
