#include "lem/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace lem {

DiscreteGame build_discrete_game(const MarketScenario& s, double price_step) {
    s.validate();
    if (s.suppliers.size() != 2) {
        throw std::invalid_argument("build_discrete_game: duopoly only");
    }
    if (!(price_step > 0.0)) throw std::invalid_argument("build_discrete_game: bad price step");
    const long m = std::lround(s.price_cap / price_step);
    if (m < 1 || std::fabs(double(m) * price_step - s.price_cap) > 1e-9 * s.price_cap) {
        throw std::invalid_argument("build_discrete_game: price_step must divide the cap");
    }

    DiscreteGame g;
    g.demand = s.demand;
    g.price_cap = s.price_cap;
    g.price_grid.resize(std::size_t(m) + 1);
    for (long k = 0; k <= m; ++k) g.price_grid[std::size_t(k)] = s.price_cap * double(k) / double(m);

    const std::size_t n = g.price_grid.size();
    std::vector<std::vector<double>> qty(2, std::vector<double>(n));
    for (int i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            qty[i][k] = dominant_quantity(g.price_grid[k], s.suppliers[i].invests,
                                          s.suppliers[i].dist, s.penalty);
        }
    }

    g.payoff.assign(2, std::vector<std::vector<double>>(n, std::vector<double>(n)));
    for (std::size_t a = 0; a < n; ++a) {
        const std::vector<Bid> tie_bids = {{g.price_grid[a], qty[0][a]}, {g.price_grid[a], qty[1][a]}};
        const Allocation tie = allocate_demand(tie_bids, s.demand, s);
        for (int i = 0; i < 2; ++i) {
            g.payoff[i][a][a] = supplier_revenue(g.price_grid[a], tie.purchased[std::size_t(i)],
                                                 s.suppliers[i].invests, s.suppliers[i].dist,
                                                 s.penalty);
        }
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            for (int i = 0; i < 2; ++i) {
                const int o = 1 - i;
                double x;
                if (a < b) {
                    x = std::min(s.demand, qty[i][a]);
                } else {
                    const double leftover =
                        std::max(s.demand - std::min(s.demand, qty[o][b]), 0.0);
                    x = std::min(leftover, qty[i][a]);
                }
                g.payoff[i][a][b] = supplier_revenue(g.price_grid[a], x, s.suppliers[i].invests,
                                                     s.suppliers[i].dist, s.penalty);
            }
        }
    }
    return g;
}

NashCheck epsilon_nash_check(const DiscreteGame& game,
                             const std::vector<std::vector<double>>& strategies, double epsilon) {
    const std::size_t n = game.price_grid.size();
    if (strategies.size() != 2) {
        throw std::invalid_argument("epsilon_nash_check: need two strategy vectors");
    }
    for (const auto& st : strategies) {
        if (st.size() != n) throw std::invalid_argument("epsilon_nash_check: strategy size mismatch");
        double sum = 0.0;
        for (double q : st) {
            if (q < -1e-12) throw std::invalid_argument("epsilon_nash_check: negative probability");
            sum += q;
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
            throw std::invalid_argument("epsilon_nash_check: probabilities must sum to 1");
        }
    }

    NashCheck out;
    out.pass = true;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& own = strategies[i];
        const auto& opp = strategies[1 - i];
        double value = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            if (own[a] == 0.0) continue;
            double row = 0.0;
            for (std::size_t b = 0; b < n; ++b) row += opp[b] * game.payoff[i][a][b];
            value += own[a] * row;
        }
        const BestResponse br = best_response_scan(game, i, opp);
        const double gain = br.payoff - value;
        if (gain > out.worst_gain) {
            out.worst_gain = gain;
            out.worst_supplier = i;
            out.worst_price = br.price;
        }
        if (gain > epsilon) out.pass = false;
    }
    return out;
}

double default_epsilon(const MarketScenario& scenario) {
    return 1e-3 * scenario.price_cap * scenario.demand;
}

BestResponse best_response_scan(const DiscreteGame& game, std::size_t who,
                                const std::vector<double>& opponent_mixture) {
    const std::size_t n = game.price_grid.size();
    if (opponent_mixture.size() != n) {
        throw std::invalid_argument("best_response_scan: mixture size mismatch");
    }
    BestResponse best;
    best.payoff = -1e300;
    for (std::size_t a = 0; a < n; ++a) {
        double v = 0.0;
        for (std::size_t b = 0; b < n; ++b) v += opponent_mixture[b] * game.payoff[who][a][b];
        if (v > best.payoff) {
            best.payoff = v;
            best.index = a;
            best.price = game.price_grid[a];
        }
    }
    return best;
}

double pure_profile_deviation_gain(const MarketScenario& s, const std::vector<double>& prices,
                                   double price_step) {
    s.validate();
    const std::size_t n = s.suppliers.size();
    if (prices.size() != n) {
        throw std::invalid_argument("pure_profile_deviation_gain: price vector size mismatch");
    }
    const long m = std::lround(s.price_cap / price_step);
    if (m < 1 || std::fabs(double(m) * price_step - s.price_cap) > 1e-9 * s.price_cap) {
        throw std::invalid_argument("pure_profile_deviation_gain: price_step must divide the cap");
    }

    const auto profile_payoff = [&](const std::vector<double>& p, std::size_t who) {
        std::vector<Bid> bids(n);
        for (std::size_t i = 0; i < n; ++i) {
            bids[i] = {p[i], dominant_quantity(p[i], s.suppliers[i].invests, s.suppliers[i].dist,
                                               s.penalty)};
        }
        const Allocation alloc = allocate_demand(bids, s.demand, s);
        return supplier_revenue(p[who], alloc.purchased[who], s.suppliers[who].invests,
                                s.suppliers[who].dist, s.penalty);
    };

    double worst = -1e300;
    for (std::size_t i = 0; i < n; ++i) {
        const double base = profile_payoff(prices, i);
        for (long k = 0; k <= m; ++k) {
            std::vector<double> dev = prices;
            dev[i] = s.price_cap * double(k) / double(m);
            worst = std::max(worst, profile_payoff(dev, i) - base);
        }
    }
    return worst;
}

}  // namespace lem
