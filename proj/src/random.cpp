// Copyright 2026 The qswr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qsw/random.hpp"

#include <cmath>
#include <numbers>

#include "qsw/errors.hpp"

namespace qsw {

int Rng::integer(int lo, int hi) {
  if (hi < lo) throw InvalidArgument("empty integer range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(engine_() % span);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(phi);
  has_spare_ = true;
  return r * std::cos(phi);
}

Matrix random_hermitian(Rng& rng, std::size_t dim, double scale) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix a(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) a(i, j) = rng.complex_normal();
  }
  return (0.5 * scale) * (a + a.adjoint());
}

LindbladModel random_lindblad(Rng& rng, const HilbertSpace& space, int jumps) {
  const auto d = static_cast<Eigen::Index>(space.dimension());
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  Operator h(space, random_hermitian(rng, space.dimension(), norm));
  std::vector<Jump> list;
  for (int k = 0; k < jumps; ++k) {
    Matrix l(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
      for (Eigen::Index i = 0; i < d; ++i) l(i, j) = norm * rng.complex_normal();
    }
    list.push_back({Operator(space, l), rng.uniform(0.05, 1.0)});
  }
  return LindbladModel(std::move(h), std::move(list));
}

Graph random_graph(Rng& rng, int nodes, const RandomGraphOptions& options) {
  std::vector<double> onsite(static_cast<std::size_t>(nodes));
  for (double& e : onsite) e = rng.uniform(-options.onsite_spread, options.onsite_spread);
  std::vector<CoherentEdge> coherent;
  std::vector<IncoherentEdge> incoherent;
  for (int a = 0; a < nodes; ++a) {
    for (int b = a + 1; b < nodes; ++b) {
      if (rng.uniform() < options.coherent_density) {
        const cplx w = options.complex_weights ? cplx{rng.uniform(0.2, 1.0), rng.uniform(-1.0, 1.0)}
                                               : cplx{rng.uniform(0.2, 1.0), 0.0};
        coherent.push_back({a, b, w});
      }
    }
  }
  for (int from = 0; from < nodes; ++from) {
    for (int to = 0; to < nodes; ++to) {
      if (from != to && rng.uniform() < options.incoherent_density) {
        incoherent.push_back({from, to, rng.uniform(0.1, 1.0)});
      }
    }
  }
  return Graph(nodes, std::move(onsite), std::move(coherent), std::move(incoherent));
}

BathCouplingSpec random_spec(Rng& rng, int nodes, const RandomSpecOptions& options) {
  std::vector<Bath> baths;
  for (CouplingKind kind : options.kinds) {
    for (int k = 0; k < options.baths_per_kind; ++k) {
      Bath b{kind, std::vector<double>(static_cast<std::size_t>(nodes))};
      for (double& c : b.coefficients) c = rng.uniform(-1.0, 1.0);
      baths.push_back(std::move(b));
    }
  }
  return BathCouplingSpec(nodes, std::move(baths), options.spectral, options.temperature);
}

BathCouplingSpec zero_sum_spec(Rng& rng, int nodes, CouplingKind kind, int baths,
                               SpectralModel spectral, double temperature) {
  if (baths < 2) throw InvalidArgument("a zero-sum spec needs at least two baths");
  std::vector<Bath> out(static_cast<std::size_t>(baths),
                        Bath{kind, std::vector<double>(static_cast<std::size_t>(nodes), 0.0)});
  for (std::size_t j = 0; j < static_cast<std::size_t>(nodes); ++j) {
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < out.size(); ++k) {
      out[k].coefficients[j] = rng.uniform(-1.0, 1.0);
      sum += out[k].coefficients[j];
    }
    out.back().coefficients[j] = -sum;
  }
  return BathCouplingSpec(nodes, std::move(out), spectral, temperature);
}

Eigensystem random_nondegenerate(Rng& rng, const HilbertSpace& space,
                                 const RandomGraphOptions& options, double tol_freq,
                                 int max_attempts) {
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    const Graph g = random_graph(rng, space.node_count(), options);
    Eigensystem eig = eigendecompose(graph_hamiltonian(g, space), tol_freq);
    if (eig.nondegenerate()) return eig;
  }
  throw Error("no nondegenerate random graph found on this space");
}

}  // namespace qsw
