#pragma once

#include <optional>

#include "sdfe/clearing.hpp"

namespace sdfe {

// Signed markup-markdown vector mu_i = Lambda_i q_i in the firm's canonical
// good order: first entry is the output markup, input entries are negative
// with markdown magnitude -entry.
struct MarkupVector {
  Vec entries;
};

// Weighted goods projection G and the diagonal D of the clearing matrix,
// optionally with one firm's schedule removed.
struct GoodsNetwork {
  Mat g;
  Vec d;
  std::optional<Index> removed_firm;
};

MarkupVector markup_vector(const PriceImpact& impact, const Vec& net_trades);

// Independent markup oracle: output markup as price minus marginal cost and
// markdowns as marginal revenue product minus input price, via central
// finite differences on the residual schedule. Agrees with markup_vector at
// interior equilibria.
MarkupVector markup_fd_oracle(const Economy& economy,
                              const SlopeProfile& slopes, Index firm);

GoodsNetwork goods_network(const Economy& economy, const SlopeProfile& slopes,
                           std::optional<Index> removed_firm = std::nullopt);

// Centrality-form prices (I - G)^{-1} D^{-1} A_bar. Equals M^{-1} A_bar
// exactly; the assertion lives in the tests.
Vec centrality_prices(const GoodsNetwork& gn, const Vec& a_bar);

// Markup vector through the goods-network route: q_i^out times the
// N(i)-block of (I - G_{-i})^{-1} D_{-i}^{-1} applied to v_i.
MarkupVector markup_centrality(const Economy& economy,
                               const SlopeProfile& slopes, Index firm);

// Quasi-linear welfare: gross consumer utility minus total labor.
double welfare(const Economy& economy, const PriceQuantityState& state);

// Residual prices seen by `firm` when it trades q (output units): all other
// schedules cleared, p = (M - Bhat_i)^{-1}(A_bar_{-i} - q vhat_i). Used by
// the finite-difference oracle; restricted to the firm's traded goods.
Vec residual_prices(const Economy& economy, const SlopeProfile& slopes,
                    Index firm, double q_out);

}  // namespace sdfe
