#include "siltlab/intersection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace silt {

double compensated_sum(std::vector<double>& terms) {
  std::sort(terms.begin(), terms.end(), std::greater<double>());
  double s = 0.0, comp = 0.0;
  for (double v : terms) {
    double t = s + v;
    comp += (std::abs(s) >= std::abs(v)) ? (s - t) + v : (v - t) + s;
    s = t;
  }
  return s + comp;
}

namespace {

double power_sum(const LocalTimeField& field, double q) {
  std::vector<double> terms;
  terms.reserve(field.support_size());
  field.for_each([&](const SiteKey&, double m) { terms.push_back(std::pow(m, q)); });
  return compensated_sum(terms);
}

}  // namespace

double silt(const LocalTimeField& field, double q) {
  if (!(q > 1.0)) throw std::invalid_argument("silt: q must be > 1");
  return power_sum(field, q);
}

double milt(const std::vector<const LocalTimeField*>& fields) {
  if (fields.size() < 2) throw std::invalid_argument("milt: need at least 2 fields");
  const LocalTimeField* first = fields.front();
  for (const LocalTimeField* f : fields) {
    if (!f) throw std::invalid_argument("milt: null field");
    if (f->dim() != first->dim() || f->geometry() != first->geometry() ||
        f->torus_R() != first->torus_R())
      throw std::invalid_argument("milt: fields must share dimension and geometry");
  }
  // iterate the smallest support, look the others up
  std::size_t base_i = 0;
  for (std::size_t i = 1; i < fields.size(); ++i)
    if (fields[i]->support_size() < fields[base_i]->support_size()) base_i = i;
  const LocalTimeField* base = fields[base_i];

  std::vector<double> terms;
  terms.reserve(base->support_size());
  const int d = base->dim();
  base->for_each([&](const SiteKey& k, double m) {
    double prod = m;
    std::int64_t site[kMaxDim] = {0};
    for (int j = 0; j < d; ++j) site[j] = k.c[j];
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i == base_i) continue;
      prod *= fields[i]->mass_at(site);
      if (prod == 0.0) break;
    }
    if (prod != 0.0) terms.push_back(prod);
  });
  return compensated_sum(terms);
}

double field_lq_norm(const LocalTimeField& field, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("field_lq_norm: q must be >= 1");
  return std::pow(power_sum(field, q), 1.0 / q);
}

LocalTimeField fold(const LocalTimeField& field, int R) {
  if (field.geometry() != Geometry::lattice)
    throw std::invalid_argument("fold: input must live on the full lattice");
  if (R < 1) throw std::invalid_argument("fold: R must be >= 1");
  LocalTimeField out(field.dim(), Geometry::torus, R);
  const int d = field.dim();
  field.for_each([&](const SiteKey& k, double m) {
    std::int64_t site[kMaxDim] = {0};
    for (int j = 0; j < d; ++j) site[j] = k.c[j];
    out.deposit(site, m);
  });
  out.set_elapsed(field.elapsed());
  out.set_jump_count(field.jump_count());
  return out;
}

}  // namespace silt
