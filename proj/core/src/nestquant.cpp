#include <cmath>
#include <stdexcept>

#include "qmm/lattice.hpp"

namespace qmm {

std::vector<double> nestquant_scale_bank(int q, int num_scales) {
  if (q < 2 || num_scales < 1)
    throw std::invalid_argument("nestquant_scale_bank: bad parameters");
  // Largest scale: the granular region of the q-nested code spans roughly
  // q/2 per axis, so beta_max * q/2 = 6 keeps a 6-sigma chunk of a
  // unit-variance source inside it. Successive scales shrink by sqrt(2).
  double beta_max = 12.0 / static_cast<double>(q);
  std::vector<double> bank(num_scales);
  for (int k = 0; k < num_scales; ++k)
    bank[k] = beta_max * std::exp2(-0.5 * k);
  return bank;
}

NestQuantResult nestquant(std::span<const double> x, int q, int num_scales) {
  if (x.size() == 0 || x.size() % 8 != 0)
    throw std::invalid_argument(
        "nestquant: length must be a positive multiple of 8");
  std::vector<double> bank = nestquant_scale_bank(q, num_scales);
  VoronoiCode code{e8_lattice(), q};

  NestQuantResult res;
  std::size_t chunks = x.size() / 8;
  res.indices.resize(chunks);
  res.scale_index.resize(chunks);
  res.reconstruction.resize(x.size());
  res.rate_bits = std::log2(static_cast<double>(q)) +
                  std::log2(static_cast<double>(num_scales)) / 8.0;

  std::vector<double> scaled(8);
  for (std::size_t c = 0; c < chunks; ++c) {
    std::span<const double> chunk = x.subspan(8 * c, 8);
    double best_err = 0.0;
    for (int k = 0; k < num_scales; ++k) {
      double beta = bank[k];
      for (int i = 0; i < 8; ++i) scaled[i] = chunk[i] / beta;
      std::vector<std::int64_t> v = code.encode(scaled);
      std::vector<double> rec = code.decode(v);
      double err = 0.0;
      for (int i = 0; i < 8; ++i) {
        double e = chunk[i] - beta * rec[i];
        err += e * e;
      }
      if (k == 0 || err < best_err) {
        best_err = err;
        res.scale_index[c] = k;
        res.indices[c] = std::move(v);
        for (int i = 0; i < 8; ++i)
          res.reconstruction[8 * c + i] = beta * rec[i];
      }
    }
  }
  return res;
}

}  // namespace qmm
