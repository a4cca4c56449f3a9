// Copyright 2026 The Hetclose Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hetclose/local_protocol.h"

#include <bit>
#include <cmath>

#include "absl/strings/str_format.h"
#include "hetclose/domain_compression.h"
#include "hetclose/majority.h"
#include "hetclose/randomized_response.h"
#include "hetclose/sampling.h"
#include "hetclose/status_macros.h"

namespace hetclose {
namespace {

absl::Status CheckSameDims(std::initializer_list<const BitMatrix*> matrices) {
  const int cols = (*matrices.begin())->cols();
  for (const BitMatrix* m : matrices) {
    if (m->cols() != cols) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "bit matrices disagree on dimension: %d vs %d", m->cols(), cols));
    }
    if (m->rows() == 0) {
      return absl::InvalidArgumentError("bit matrix has no rows");
    }
  }
  return absl::OkStatus();
}

int HadamardOrder(int k) {
  return static_cast<int>(std::bit_ceil(static_cast<uint32_t>(k + 1)));
}

// Splits the rows in two equal halves.
std::pair<BitMatrix, BitMatrix> Halves(const BitMatrix& rows) {
  const int half = rows.rows() / 2;
  return {rows.Rows(0, half), rows.Rows(half, half)};
}

// One run of the private-coin protocol on given user samples.
absl::StatusOr<double> PrivateCoinZ2(const HadamardDesign& design,
                                     const SampleSet& p_users,
                                     const SampleSet& q_users, double eps1,
                                     double eps2, Rng& rng) {
  Rng p_rng = rng.Fork(1);
  Rng q_rng = rng.Fork(2);
  ASSIGN_OR_RETURN(BitMatrix p_rows, EncodeUsers(p_users, design, eps1, p_rng));
  ASSIGN_OR_RETURN(BitMatrix q_rows, EncodeUsers(q_users, design, eps2, q_rng));
  if (p_rows.rows() < 2 || q_rows.rows() < 2) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "need at least 2 users per Hadamard group, have %d and %d",
        p_rows.rows(), q_rows.rows()));
  }
  auto [x, x_prime] = Halves(p_rows);
  auto [y, y_prime] = Halves(q_rows);
  return Z2Statistic(x, x_prime, y, y_prime, eps1, eps2);
}

absl::StatusOr<double> PrivateCoinStatistic(const LocalConfig& config,
                                            const Distribution& p,
                                            const Distribution& q, Rng& rng) {
  ASSIGN_OR_RETURN(HadamardDesign design, BuildDesign(config.k));
  Rng sample_rng = rng.Fork(0);
  const SampleSet p_users = Sample(p, config.n1, sample_rng, Group::kFirst);
  const SampleSet q_users = Sample(q, config.n2, sample_rng, Group::kSecond);
  return PrivateCoinZ2(design, p_users, q_users, config.eps1, config.eps2,
                       rng);
}

// One public-coin repetition: shared partition, fresh users.
absl::StatusOr<double> PublicCoinStatistic(const LocalConfig& config,
                                           const Distribution& p,
                                           const Distribution& q, Rng& rng) {
  ASSIGN_OR_RETURN(HadamardDesign design, BuildDesign(config.compressed_size));
  Rng public_rng = rng.Fork(3);
  ASSIGN_OR_RETURN(Partition partition,
                   RandomPartition(config.k, config.compressed_size,
                                   public_rng));
  Rng sample_rng = rng.Fork(0);
  const int64_t n1 = config.n1 / config.repetitions;
  const int64_t n2 = config.n2 / config.repetitions;
  ASSIGN_OR_RETURN(
      SampleSet p_users,
      CompressSamples(Sample(p, n1, sample_rng, Group::kFirst), partition));
  ASSIGN_OR_RETURN(
      SampleSet q_users,
      CompressSamples(Sample(q, n2, sample_rng, Group::kSecond), partition));
  return PrivateCoinZ2(design, p_users, q_users, config.eps1, config.eps2,
                       rng);
}

absl::Status CheckPair(const LocalConfig& config, const Distribution& p,
                       const Distribution& q) {
  if (p.k() != config.k || q.k() != config.k) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "config is over k=%d but distributions are over %d and %d", config.k,
        p.k(), q.k()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<BitMatrix> SampleProductBernoulli(std::span<const double> mu,
                                                 int rows, Rng& rng) {
  if (rows < 0) return absl::InvalidArgumentError("negative row count");
  for (double m : mu) {
    if (!(m >= 0 && m <= 1)) {
      return absl::InvalidArgumentError(
          absl::StrFormat("Bernoulli mean %g outside [0, 1]", m));
    }
  }
  BitMatrix out(rows, static_cast<int>(mu.size()));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < out.cols(); ++c) out.set(r, c, rng.Bernoulli(mu[c]));
  }
  return out;
}

absl::StatusOr<BitMatrix> EncodeUsers(const SampleSet& samples,
                                      const HadamardDesign& design,
                                      double epsilon, Rng& rng) {
  if (!(epsilon > 0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("epsilon must be positive, got %g", epsilon));
  }
  if (samples.k != design.k()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "samples over k=%d, design over k=%d", samples.k, design.k()));
  }
  const int groups = design.order();
  const int64_t n = static_cast<int64_t>(samples.size());
  if (n < groups) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "%d users cannot fill %d Hadamard groups", n, groups));
  }
  const int m = static_cast<int>(n / groups);
  const RrChannel channel(epsilon);
  BitMatrix out(m, groups);
  for (int64_t u = 0; u < static_cast<int64_t>(m) * groups; ++u) {
    const int group = static_cast<int>(u / m);
    const int row = static_cast<int>(u % m);
    const int32_t x = samples.values[u];
    if (x < 0 || x >= design.k()) {
      return absl::OutOfRangeError(
          absl::StrFormat("sample %d outside [0, %d)", x, design.k()));
    }
    const int bit = design.Contains(group, x) ? 1 : 0;
    out.set(row, group, channel.Apply(bit, rng));
  }
  return out;
}

std::vector<double> DebiasedMeans(const BitMatrix& rows, double epsilon) {
  const double gamma = DebiasScale(epsilon);
  const double flip = FlipProbability(epsilon);
  std::vector<double> means = rows.ColumnMeans();
  for (double& v : means) v = gamma * (v - flip);
  return means;
}

absl::StatusOr<double> Z1Statistic(const BitMatrix& x, const BitMatrix& x_prime,
                                   const BitMatrix& y,
                                   const BitMatrix& y_prime) {
  RETURN_IF_ERROR(CheckSameDims({&x, &x_prime, &y, &y_prime}));
  const std::vector<double> mx = x.ColumnMeans();
  const std::vector<double> mxp = x_prime.ColumnMeans();
  const std::vector<double> my = y.ColumnMeans();
  const std::vector<double> myp = y_prime.ColumnMeans();
  double z = 0;
  for (size_t j = 0; j < mx.size(); ++j) {
    z += (mx[j] - my[j]) * (mxp[j] - myp[j]);
  }
  return z;
}

int64_t ProductTestSampleSize(int dims, double alpha) {
  return static_cast<int64_t>(
      std::ceil(100.0 * std::sqrt(static_cast<double>(dims)) / (alpha * alpha)));
}

double Z1VarianceBound(int dims, int64_t rows, double mean_gap_sq) {
  const double n = static_cast<double>(rows);
  return dims / (n * n) + 2.0 * mean_gap_sq / n;
}

absl::StatusOr<TestVerdict> Z1Test(const BitMatrix& p_rows,
                                   const BitMatrix& q_rows, double alpha) {
  if (p_rows.rows() < 2 || q_rows.rows() < 2) {
    return absl::FailedPreconditionError(
        "Z1 test needs at least two rows per distribution");
  }
  auto [x, x_prime] = Halves(p_rows);
  auto [y, y_prime] = Halves(q_rows);
  ASSIGN_OR_RETURN(const double z, Z1Statistic(x, x_prime, y, y_prime));
  return z <= alpha * alpha / 2 ? TestVerdict::kAccept : TestVerdict::kReject;
}

absl::StatusOr<double> Z2Statistic(const BitMatrix& x, const BitMatrix& x_prime,
                                   const BitMatrix& y, const BitMatrix& y_prime,
                                   double eps1, double eps2) {
  RETURN_IF_ERROR(CheckSameDims({&x, &x_prime, &y, &y_prime}));
  if (!(eps1 > 0) || !(eps2 > 0)) {
    return absl::InvalidArgumentError("privacy parameters must be positive");
  }
  const double g1 = DebiasScale(eps1);
  const double g2 = DebiasScale(eps2);
  const std::vector<double> mx = x.ColumnMeans();
  const std::vector<double> mxp = x_prime.ColumnMeans();
  const std::vector<double> my = y.ColumnMeans();
  const std::vector<double> myp = y_prime.ColumnMeans();
  double z = 0;
  for (size_t j = 0; j < mx.size(); ++j) {
    const double a = g1 * (mx[j] - 0.5) - g2 * (my[j] - 0.5);
    const double b = g1 * (mxp[j] - 0.5) - g2 * (myp[j] - 0.5);
    z += a * b;
  }
  return z;
}

double LocalConfig::EffectiveAlpha() const {
  if (!public_coin) return alpha;
  return compression_c1 *
         std::sqrt(static_cast<double>(compressed_size) / k) * alpha;
}

double LocalConfig::EffectiveThreshold() const {
  if (threshold.has_value()) return *threshold;
  const double a = EffectiveAlpha();
  return a * a / 2;
}

absl::Status LocalConfig::Validate() const {
  if (k < 2) {
    return absl::InvalidArgumentError(
        absl::StrFormat("k must be at least 2, got %d", k));
  }
  if (!(alpha > 0 && alpha <= 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must lie in (0, 1], got %g", alpha));
  }
  if (!(eps1 > 0 && eps1 <= 1) || !(eps2 > 0 && eps2 <= 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "eps1, eps2 must lie in (0, 1], got %g, %g", eps1, eps2));
  }
  int domain = k;
  int64_t users1 = n1;
  int64_t users2 = n2;
  if (public_coin) {
    if (compressed_size < 2 || compressed_size > k) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "compressed size must lie in [2, %d], got %d", k, compressed_size));
    }
    if (repetitions < 1 || repetitions % 2 == 0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "repetitions must be a positive odd count, got %d", repetitions));
    }
    if (!(compression_c1 > 0)) {
      return absl::InvalidArgumentError("compression constant must be positive");
    }
    domain = compressed_size;
    users1 /= repetitions;
    users2 /= repetitions;
  }
  if (domain + 1 > HadamardDesign::kMaxOrder) {
    return absl::ResourceExhaustedError(
        absl::StrFormat("k=%d exceeds the Hadamard order budget", domain));
  }
  const int groups = HadamardOrder(domain);
  if (users1 < 2 * groups || users2 < 2 * groups) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "each run needs at least %d users per group (2 per Hadamard "
        "subgroup), have %d and %d",
        2 * groups, users1, users2));
  }
  return absl::OkStatus();
}

absl::StatusOr<double> LocalStatistic(const LocalConfig& config,
                                      const Distribution& p,
                                      const Distribution& q, Rng& rng) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckPair(config, p, q));
  return config.public_coin ? PublicCoinStatistic(config, p, q, rng)
                            : PrivateCoinStatistic(config, p, q, rng);
}

absl::StatusOr<TestVerdict> RunLocalPrivateCoin(const LocalConfig& config,
                                                const Distribution& p,
                                                const Distribution& q,
                                                Rng& rng) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckPair(config, p, q));
  ASSIGN_OR_RETURN(const double z, PrivateCoinStatistic(config, p, q, rng));
  return z <= config.EffectiveThreshold() ? TestVerdict::kAccept
                                          : TestVerdict::kReject;
}

absl::StatusOr<TestVerdict> RunLocalPublicCoin(const LocalConfig& config,
                                               const Distribution& p,
                                               const Distribution& q,
                                               Rng& rng) {
  RETURN_IF_ERROR(config.Validate());
  RETURN_IF_ERROR(CheckPair(config, p, q));
  if (!config.public_coin) {
    return absl::InvalidArgumentError("config is not marked public-coin");
  }
  const double threshold = config.EffectiveThreshold();
  const TestProcedure once = [&](Rng& run_rng) -> absl::StatusOr<TestVerdict> {
    ASSIGN_OR_RETURN(const double z,
                     PublicCoinStatistic(config, p, q, run_rng));
    return z <= threshold ? TestVerdict::kAccept : TestVerdict::kReject;
  };
  const Rng base = rng.Fork(0);
  return MajorityRepeat(once, config.repetitions, base);
}

}  // namespace hetclose
