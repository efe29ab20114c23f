#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lw/met/metrics.hpp"
#include "lw/num/prng.hpp"

using namespace lw;
using namespace lw::met;

namespace {

gen::TraditionModel zero_encoder_model(int dz, int dx) {
  num::PrngStream s(0, 0);
  gen::TraditionModel m = gen::make_tradition_model(dz, dx, 0.1, s);
  for (auto& t : m.enc_params.values) t.data_vec().assign(t.size(), 0.0);
  return m;
}

num::Tensor random_matrix(int n, int d, num::PrngStream& s, double scale = 1.0) {
  std::vector<double> data(static_cast<std::size_t>(n) * d);
  for (auto& v : data) v = scale * s.normal();
  return num::Tensor::from_data({n, d}, std::move(data));
}

}  // namespace

TEST_CASE("collapse index is exactly zero for the prior-emitting encoder") {
  gen::TraditionModel m = zero_encoder_model(2, 5);
  num::PrngStream s(3, 0);
  num::Tensor x = random_matrix(16, 5, s);
  CHECK(posterior_collapse_index(m, x) == 0.0);
}

TEST_CASE("collapse index is non-negative for arbitrary models") {
  num::PrngStream s(4, 0);
  for (int trial = 0; trial < 5; ++trial) {
    gen::TraditionModel m = gen::make_tradition_model(2, 5, 0.1, s);
    num::Tensor x = random_matrix(16, 5, s);
    CHECK(posterior_collapse_index(m, x) >= 0.0);
  }
}

TEST_CASE("latent recovery: identity and affine maps score 1") {
  num::PrngStream s(5, 0);
  num::Tensor z = random_matrix(256, 2, s);
  CHECK(latent_recovery_r2(z, z) == doctest::Approx(1.0).epsilon(1e-9));

  // inferred = 2 z + 1
  std::vector<double> scaled(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) scaled[i] = 2.0 * z.data()[i] + 1.0;
  num::Tensor inf = num::Tensor::from_data({256, 2}, std::move(scaled));
  CHECK(latent_recovery_r2(inf, z) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("latent recovery: independent noise scores at most 0.1 at n=2048") {
  num::PrngStream s(6, 0);
  num::Tensor z = random_matrix(2048, 2, s);
  num::Tensor noise = random_matrix(2048, 2, s);
  CHECK(latent_recovery_r2(noise, z) <= 0.1);
}

TEST_CASE("latent recovery: affine invariance of the probe") {
  num::PrngStream s(7, 0);
  num::Tensor z = random_matrix(512, 2, s);
  // inferred = noisy z
  std::vector<double> noisy(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) noisy[i] = z.data()[i] + 0.3 * s.normal();
  num::Tensor inf = num::Tensor::from_data({512, 2}, noisy);
  const double base = latent_recovery_r2(inf, z);

  // invertible affine map of the inferred codes
  std::vector<double> mapped(z.size());
  for (int i = 0; i < 512; ++i) {
    const double a = inf.at(i, 0), b = inf.at(i, 1);
    mapped[static_cast<std::size_t>(i) * 2 + 0] = 1.3 * a - 0.4 * b + 0.7;
    mapped[static_cast<std::size_t>(i) * 2 + 1] = 0.2 * a + 0.9 * b - 1.1;
  }
  num::Tensor inf2 = num::Tensor::from_data({512, 2}, std::move(mapped));
  CHECK(std::abs(latent_recovery_r2(inf2, z) - base) < 1e-6);
}

TEST_CASE("latent recovery guards: too few rows, constant target") {
  num::PrngStream s(8, 0);
  num::Tensor z = random_matrix(8, 2, s);
  CHECK_THROWS(latent_recovery_r2(z, z));

  num::Tensor inf = random_matrix(256, 2, s);
  num::Tensor constant = num::Tensor::from_data({256, 1}, std::vector<double>(256, 3.0));
  CHECK_THROWS(latent_recovery_r2(inf, constant));
}

TEST_CASE("alignment: identical sets score 1, affine maps leave it unchanged") {
  num::PrngStream s(9, 0);
  num::Tensor a = random_matrix(512, 2, s);
  CHECK(cross_tradition_alignment(a, a) == doctest::Approx(1.0).epsilon(1e-6));

  // b = a M + c for invertible M
  std::vector<double> b(a.size());
  for (int i = 0; i < 512; ++i) {
    const double u = a.at(i, 0), v = a.at(i, 1);
    b[static_cast<std::size_t>(i) * 2 + 0] = 1.2 * u + 0.3 * v + 0.5;
    b[static_cast<std::size_t>(i) * 2 + 1] = -0.4 * u + 0.9 * v - 1.0;
  }
  num::Tensor bt = num::Tensor::from_data({512, 2}, std::move(b));
  CHECK(cross_tradition_alignment(a, bt) == doctest::Approx(1.0).epsilon(1e-6));

  // invariance on a noisy relation
  std::vector<double> noisy(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) noisy[i] = a.data()[i] + 0.5 * s.normal();
  num::Tensor nb = num::Tensor::from_data({512, 2}, noisy);
  const double base = cross_tradition_alignment(a, nb);
  std::vector<double> nb2(a.size());
  for (int i = 0; i < 512; ++i) {
    const double u = nb.at(i, 0), v = nb.at(i, 1);
    nb2[static_cast<std::size_t>(i) * 2 + 0] = 0.7 * u - 1.1 * v + 2.0;
    nb2[static_cast<std::size_t>(i) * 2 + 1] = 0.5 * u + 0.6 * v - 0.3;
  }
  num::Tensor nbt = num::Tensor::from_data({512, 2}, std::move(nb2));
  CHECK(std::abs(cross_tradition_alignment(a, nbt) - base) < 1e-6);
}

TEST_CASE("alignment: independent sets score low at n=2048") {
  num::PrngStream s(10, 0);
  num::Tensor a = random_matrix(2048, 2, s);
  num::Tensor b = random_matrix(2048, 2, s);
  CHECK(cross_tradition_alignment(a, b) <= 0.2);
}

TEST_CASE("off-manifold distance: point on the manifold reports near zero") {
  num::PrngStream s(11, 0);
  gen::TraditionModel m = gen::make_tradition_model(2, 6, 0.1, s, {16});
  DecoderFn g = decoder_fn_of(m);
  const std::vector<double> z0{0.4, -0.9};
  const auto x = g(z0);
  CHECK(off_manifold_distance(x, g, 2) <= 1e-3);
}

TEST_CASE("off-manifold distance: unit circle decoder at the origin gives 1") {
  DecoderFn circle = [](const std::vector<double>& z) {
    return std::vector<double>{std::cos(z[0]), std::sin(z[0])};
  };
  const std::vector<double> origin{0.0, 0.0};
  CHECK(off_manifold_distance(origin, circle, 1) == doctest::Approx(1.0).epsilon(1e-3));
  // grid reference agrees
  CHECK(off_manifold_distance_grid(origin, circle, 1, -3.2, 3.2, 0.001) ==
        doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("off-manifold distance is an upper bound on the grid refinement") {
  num::PrngStream s(12, 0);
  gen::TraditionModel m = gen::make_tradition_model(2, 6, 0.1, s, {16});
  DecoderFn g = decoder_fn_of(m);
  for (int trial = 0; trial < 3; ++trial) {
    std::vector<double> x(6);
    for (auto& v : x) v = s.uniform(-1.5, 1.5);
    const double reported = off_manifold_distance(x, g, 2);
    const double grid = off_manifold_distance_grid(x, g, 2, -kLatentBox, kLatentBox, 0.01);
    CHECK(grid <= reported + 1e-6);
  }
}

TEST_CASE("regime classification covers all quadrants with inclusive boundaries") {
  RegimeThresholds th{-10.0, 2.0};
  CHECK(regime_classify({-5.0, 1.0, 0.0}, th) == RegimeLabel::kPerennialistOptimum);
  CHECK(regime_classify({-5.0, 3.0, 0.0}, th) == RegimeLabel::kSpiritualRigidity);
  CHECK(regime_classify({-15.0, 0.1, 0.0}, th) == RegimeLabel::kUniversalistCollapse);
  CHECK(regime_classify({-15.0, 3.0, 0.0}, th) == RegimeLabel::kDilettantism);
  // boundary: exactly at recon_ref counts as >=, exactly at kl_ref as <=
  CHECK(regime_classify({-10.0, 2.0, 0.0}, th) == RegimeLabel::kPerennialistOptimum);
  CHECK(regime_name(RegimeLabel::kDilettantism) == "dilettantism");
}

TEST_CASE("cross-encoder reconstruction: dimension mismatch throws") {
  num::PrngStream s(13, 0);
  gen::TraditionModel a = gen::make_tradition_model(2, 5, 0.1, s);
  gen::TraditionModel b = gen::make_tradition_model(3, 5, 0.1, s);
  num::Tensor x = random_matrix(8, 5, s);
  CHECK_THROWS(cross_encoder_reconstruction(a, b, x));
}

TEST_CASE("cross-encoder reconstruction: untrained models show no matching signal") {
  num::PrngStream s(14, 0);
  gen::TraditionModel a = gen::make_tradition_model(2, 5, 0.1, s);
  gen::TraditionModel b = gen::make_tradition_model(2, 5, 0.1, s);
  num::Tensor x = random_matrix(64, 5, s);
  const double matched = cross_encoder_reconstruction(b, b, x);
  const double mismatched = cross_encoder_reconstruction(a, b, x);
  CHECK(mismatched / matched > 0.25);
  CHECK(mismatched / matched < 4.0);
}

TEST_CASE("abductive table: identical classes tie in declared order") {
  std::vector<std::string> names{"E", "U-pooled", "U-core", "P"};
  std::vector<std::size_t> budgets{1000, 1020, 980, 1049};
  std::vector<double> col{-3.0, -3.1, -2.9, -3.0, -3.05, -2.95, -3.0, -3.0, -3.0, -3.0};
  std::vector<std::vector<double>> elbos{col, col, col, col};
  AbductiveTable t = abductive_compare(names, budgets, elbos);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(t.entries[c].klass == names[c]);
    CHECK(t.entries[c].rank == static_cast<int>(c) + 1);
  }
}

TEST_CASE("abductive table: ranking follows the mean") {
  std::vector<std::string> names{"E", "U-pooled", "U-core", "P"};
  std::vector<std::size_t> budgets{1000, 1000, 1000, 1000};
  std::vector<std::vector<double>> elbos{
      {-3.0, -3.0}, {-2.0, -2.0}, {-4.0, -4.0}, {-1.0, -1.0}};
  AbductiveTable t = abductive_compare(names, budgets, elbos);
  CHECK(t.entries[3].rank == 1);  // P
  CHECK(t.entries[1].rank == 2);  // U-pooled
  CHECK(t.entries[0].rank == 3);  // E
  CHECK(t.entries[2].rank == 4);  // U-core
}

TEST_CASE("abductive table: budget mismatch is rejected") {
  std::vector<std::string> names{"E", "P"};
  std::vector<std::size_t> budgets{1000, 1100};
  std::vector<std::vector<double>> elbos{{-1.0, -1.0}, {-2.0, -2.0}};
  CHECK_THROWS(abductive_compare(names, budgets, elbos));
}

TEST_CASE("abductive table serialization round-trips") {
  std::vector<std::string> names{"E", "U-pooled", "U-core", "P"};
  std::vector<std::size_t> budgets{1000, 1000, 1000, 1000};
  std::vector<std::vector<double>> elbos{
      {-3.25, -3.5}, {-2.125, -2.0}, {-4.0, -4.75}, {-1.0625, -1.5}};
  AbductiveTable t = abductive_compare(names, budgets, elbos);
  AbductiveTable r = AbductiveTable::deserialize(t.serialize());
  CHECK(r.tie_break_rule == t.tie_break_rule);
  REQUIRE(r.entries.size() == t.entries.size());
  for (std::size_t i = 0; i < t.entries.size(); ++i) {
    CHECK(r.entries[i].klass == t.entries[i].klass);
    CHECK(r.entries[i].mean == t.entries[i].mean);
    CHECK(r.entries[i].se == t.entries[i].se);
    CHECK(r.entries[i].rank == t.entries[i].rank);
  }
  CHECK(r.serialize() == t.serialize());
}
