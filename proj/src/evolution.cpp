#include "dribbleforge/evolution.hpp"
#include "dribbleforge/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace dribbleforge {

namespace {

constexpr double kWeightLow = 0.8;
constexpr double kWeightHigh = 1.2;
constexpr double kRankPressure = 1.5;

void require_config(bool ok, std::string_view field, const std::string& msg)
{
    if (!ok) throw Error(Errc::InvalidConfig, std::string(field) + " " + msg, std::nullopt, std::string(field));
}

bool is_probability(double p) { return std::isfinite(p) && p >= 0.0 && p <= 1.0; }

void require_same_length(const Individual& a, const Individual& b)
{
    if (a.params.size() != b.params.size()) {
        throw Error(Errc::LengthMismatch, "parents have " + std::to_string(a.params.size()) + " and "
                                              + std::to_string(b.params.size()) + " entries");
    }
}

// Fitness-proportional draws over arbitrary non-negative weights.
std::vector<std::size_t> wheel(std::span<const double> weights, std::size_t count, Rng& rng)
{
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::vector<std::size_t> out(count);
    for (auto& i : out) i = pick(rng);
    return out;
}

std::vector<std::size_t> stochastic_universal(std::span<const double> fitnesses, std::size_t count, Rng& rng)
{
    std::vector<std::size_t> out;
    if (count == 0) return out;
    out.reserve(count);
    const double total = std::accumulate(fitnesses.begin(), fitnesses.end(), 0.0);
    const double spacing = total / static_cast<double>(count);
    const double start = std::uniform_real_distribution<double>(0.0, spacing)(rng);
    double cumulative = fitnesses[0];
    std::size_t i = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const double pointer = start + static_cast<double>(k) * spacing;
        while (pointer >= cumulative && i + 1 < fitnesses.size()) cumulative += fitnesses[++i];
        out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> ranked(std::span<const double> fitnesses, std::size_t count, Rng& rng)
{
    const std::size_t n = fitnesses.size();
    // worst first; rank r gets weight (2 - s) + 2(s - 1) r / (n - 1)
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitnesses[a] < fitnesses[b]; });
    std::vector<double> weights(n, 1.0);
    if (n > 1) {
        for (std::size_t r = 0; r < n; ++r) {
            weights[order[r]] = (2.0 - kRankPressure)
                                + 2.0 * (kRankPressure - 1.0) * static_cast<double>(r) / static_cast<double>(n - 1);
        }
    }
    return wheel(weights, count, rng);
}

std::vector<std::size_t> tournament(std::span<const double> fitnesses, double p_fitter, std::size_t count, Rng& rng)
{
    std::uniform_int_distribution<std::size_t> contestant(0, fitnesses.size() - 1);
    std::bernoulli_distribution fitter_wins(p_fitter);
    std::vector<std::size_t> out(count);
    for (auto& winner : out) {
        std::size_t a = contestant(rng);
        std::size_t b = contestant(rng);
        if (fitnesses[b] > fitnesses[a] || (fitnesses[b] == fitnesses[a] && b < a)) std::swap(a, b);
        winner = fitter_wins(rng) ? a : b;
    }
    return out;
}

GenerationStats summarize(std::size_t generation, std::span<const double> sorted_fitness)
{
    const double sum = std::accumulate(sorted_fitness.begin(), sorted_fitness.end(), 0.0);
    return {generation, sorted_fitness.front(), sum / static_cast<double>(sorted_fitness.size()),
            sorted_fitness.back()};
}

} // namespace

std::string_view to_string(SelectionMethod m)
{
    switch (m) {
    case SelectionMethod::Roulette: return "roulette";
    case SelectionMethod::Rank: return "rank";
    case SelectionMethod::Sus: return "sus";
    case SelectionMethod::Tournament: return "tournament";
    }
    return "unknown";
}

std::optional<SelectionMethod> parse_selection_method(std::string_view name)
{
    for (auto m : {SelectionMethod::Roulette, SelectionMethod::Rank, SelectionMethod::Sus, SelectionMethod::Tournament}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

void GaConfig::validate() const
{
    require_config(population_size >= 2, "population_size", "must be at least 2");
    require_config(is_probability(crossover_probability), "crossover_probability", "must lie in [0, 1]");
    require_config(is_probability(parent_selection_probability), "parent_selection_probability",
                   "must lie in [0, 1]");
    require_config(std::isfinite(mutation_coefficient) && mutation_coefficient >= 0.0, "mutation_coefficient",
                   "must be finite and >= 0");
    require_config(std::isfinite(initial_mutation_coefficient) && initial_mutation_coefficient >= 0.0,
                   "initial_mutation_coefficient", "must be finite and >= 0");
}

void FitnessConfig::validate() const
{
    require_config(std::isfinite(alpha_user) && alpha_user >= 0.0, "alpha_user", "must be finite and >= 0");
    require_config(std::isfinite(beta_user) && beta_user >= 0.0, "beta_user", "must be finite and >= 0");
    require_config(std::isfinite(rho) && rho > 0.0, "rho", "must be finite and > 0");
}

ParamSpace ParamSpace::from_limits(const ParamLimits& limits, std::size_t node_count)
{
    ParamSpace s;
    const std::array<double, 3> lo{0.0, limits.body_dir_range[0], limits.ball_dir_range[0]};
    const std::array<double, 3> hi{limits.max_acceleration, limits.body_dir_range[1], limits.ball_dir_range[1]};
    const std::array<double, 3> mx{limits.max_acceleration, std::numbers::pi, std::numbers::pi};
    for (std::size_t i = 0; i < node_count; ++i) {
        s.lower.insert(s.lower.end(), lo.begin(), lo.end());
        s.upper.insert(s.upper.end(), hi.begin(), hi.end());
        s.param_max.insert(s.param_max.end(), mx.begin(), mx.end());
    }
    return s;
}

std::pair<double, double> coeff_alpha_beta(const FitnessConfig& cfg, double dist)
{
    const double k = 0.1 + 50.0 * std::exp(-2.0 * dist);
    return {cfg.alpha_user * k, cfg.beta_user * k};
}

NodeContext node_context(Point2 position, double body_dir, double ball_dir)
{
    NodeContext ctx;
    ctx.body_dir = body_dir;
    ctx.ball_dir = ball_dir;
    // 0.0 - y keeps on-axis nodes at +pi rather than -pi
    ctx.body_rel_obs = std::atan2(0.0 - position.y, 0.0 - position.x);
    ctx.ball_rel_obs = wrap_angle(ctx.body_rel_obs - ball_dir);
    ctx.dist = std::hypot(position.x, position.y);
    return ctx;
}

double node_fitness(const NodeContext& ctx, const FitnessConfig& cfg)
{
    const auto [alpha, beta] = coeff_alpha_beta(cfg, ctx.dist);
    const double body_err = ctx.body_dir - ctx.body_rel_obs;
    const double ball_err = ctx.ball_rel_obs - std::numbers::pi;
    const double desired = alpha * ctx.body_dir * ctx.body_dir - body_err * body_err
                           - beta * ctx.ball_dir * ctx.ball_dir - ball_err * ball_err;
    return std::exp(desired / (cfg.rho * cfg.rho));
}

double plan_fitness(std::span<const double> params, std::span<const Point2> layout, const FitnessConfig& cfg)
{
    if (params.size() != 3 * layout.size()) {
        throw Error(Errc::LengthMismatch, "individual has " + std::to_string(params.size()) + " entries, layout needs "
                                              + std::to_string(3 * layout.size()));
    }
    double total = 0.0;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        total += node_fitness(node_context(layout[i], params[3 * i + 1], params[3 * i + 2]), cfg);
    }
    return total;
}

Individual encode(const TrajectoryPlan& plan)
{
    Individual ind;
    ind.params.reserve(3 * plan.size());
    for (const PlanNode& n : plan.nodes()) {
        ind.params.push_back(n.params.acceleration);
        ind.params.push_back(n.params.body_dir);
        ind.params.push_back(n.params.ball_dir);
    }
    return ind;
}

TrajectoryPlan decode(const TrajectoryPlan& layout, const Individual& ind)
{
    if (ind.params.size() != 3 * layout.size()) {
        throw Error(Errc::LengthMismatch, "individual has " + std::to_string(ind.params.size())
                                              + " entries, plan needs " + std::to_string(3 * layout.size()));
    }
    std::vector<NodeParams> params(layout.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        params[i] = {ind.params[3 * i], ind.params[3 * i + 1], ind.params[3 * i + 2]};
    }
    return layout.with_params(params);
}

double clipped_gaussian(Rng& rng) { return std::clamp(std::normal_distribution<double>(0.0, 1.0)(rng), -1.0, 1.0); }

Individual mutate_with(const Individual& ind, const ParamSpace& space, double coeff, std::span<const double> grn)
{
    if (ind.params.size() != space.size() || grn.size() != space.size()) {
        throw Error(Errc::LengthMismatch, "individual, bounds and draws must have equal length");
    }
    Individual out;
    out.params.resize(ind.params.size());
    for (std::size_t k = 0; k < ind.params.size(); ++k) {
        const double moved = ind.params[k] + space.param_max[k] * grn[k] * coeff / 100.0;
        out.params[k] = std::clamp(moved, space.lower[k], space.upper[k]);
    }
    return out;
}

Individual mutate(const Individual& ind, const ParamSpace& space, double coeff, Rng& rng)
{
    std::vector<double> grn(ind.params.size());
    for (auto& g : grn) g = clipped_gaussian(rng);
    return mutate_with(ind, space, coeff, grn);
}

std::pair<Individual, Individual> crossover_with_weights(const Individual& a, const Individual& b, double wi, double wj)
{
    require_same_length(a, b);
    Individual c1, c2;
    c1.params.resize(a.params.size());
    c2.params.resize(a.params.size());
    const double sum = wi + wj;
    for (std::size_t k = 0; k < a.params.size(); ++k) {
        c1.params[k] = (wi * a.params[k] + wj * b.params[k]) / sum;
        c2.params[k] = (wj * a.params[k] + wi * b.params[k]) / sum;
    }
    return {std::move(c1), std::move(c2)};
}

std::pair<Individual, Individual> crossover_pair(const Individual& a, const Individual& b, Rng& rng)
{
    require_same_length(a, b);
    std::uniform_real_distribution<double> weight(kWeightLow, kWeightHigh);
    const double wi = weight(rng);
    const double wj = weight(rng);
    return crossover_with_weights(a, b, wi, wj);
}

std::vector<Individual> init_population(const Individual& seed, const ParamSpace& space, const GaConfig& cfg,
                                        Rng& rng)
{
    std::vector<Individual> pop;
    pop.reserve(cfg.population_size);
    pop.push_back(Individual{seed.params, std::nullopt});
    while (pop.size() < cfg.population_size) pop.push_back(mutate(seed, space, cfg.initial_mutation_coefficient, rng));
    return pop;
}

std::vector<std::size_t> select_parents(std::span<const double> fitnesses, const GaConfig& cfg, std::size_t count,
                                        Rng& rng)
{
    if (fitnesses.empty()) throw Error(Errc::EmptyPopulation, "cannot select parents from an empty population");
    switch (cfg.selection_method) {
    case SelectionMethod::Roulette: return wheel(fitnesses, count, rng);
    case SelectionMethod::Rank: return ranked(fitnesses, count, rng);
    case SelectionMethod::Sus: return stochastic_universal(fitnesses, count, rng);
    case SelectionMethod::Tournament: return tournament(fitnesses, cfg.parent_selection_probability, count, rng);
    }
    return {};
}

std::vector<std::size_t> survivor_select(std::span<const double> fitnesses, std::size_t n)
{
    std::vector<std::size_t> order(fitnesses.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fitnesses[a] > fitnesses[b]; });
    order.resize(std::min(n, order.size()));
    return order;
}

std::size_t mating_pool_size(const GaConfig& cfg)
{
    if (cfg.selection_method == SelectionMethod::Tournament) return cfg.population_size;
    // the epsilon absorbs round-off such as 0.6 * 40 = 24.000000000000004
    const double scaled = cfg.parent_selection_probability * static_cast<double>(cfg.population_size);
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(scaled - 1e-9)));
}

EvolutionResult evolve(const TrajectoryPlan& seed, const GaConfig& ga, const FitnessConfig& fit,
                       const EvolveHooks& hooks)
{
    ga.validate();
    fit.validate();

    const std::vector<Point2> layout = seed.positions();
    const ParamSpace space = ParamSpace::from_limits(seed.limits(), seed.size());
    const auto evaluate = [&](Individual& ind) {
        if (!ind.fitness) ind.fitness = plan_fitness(ind.params, layout, fit);
        return *ind.fitness;
    };
    const auto fitness_of = [&](std::vector<Individual>& pop) {
        std::vector<double> f(pop.size());
        for (std::size_t i = 0; i < pop.size(); ++i) f[i] = evaluate(pop[i]);
        return f;
    };
    const auto keep = [](std::vector<Individual>& pop, const std::vector<std::size_t>& idx) {
        std::vector<Individual> next;
        next.reserve(idx.size());
        for (std::size_t i : idx) next.push_back(std::move(pop[i]));
        pop = std::move(next);
    };

    Rng rng(ga.rng_seed);
    EvolutionResult result;
    result.rng_seed = ga.rng_seed;

    std::vector<Individual> pop = init_population(encode(seed), space, ga, rng);
    std::vector<double> fitness = fitness_of(pop);
    keep(pop, survivor_select(fitness, ga.population_size));
    fitness = fitness_of(pop);

    const auto record = [&](std::size_t generation) {
        result.history.push_back(summarize(generation, fitness));
        if (hooks.on_generation) hooks.on_generation(result.history.back());
    };
    record(0);

    const std::size_t pool_size = mating_pool_size(ga);
    std::bernoulli_distribution cross(ga.crossover_probability);
    for (std::size_t g = 1; g <= ga.generation_count; ++g) {
        if (hooks.stop.stop_requested()) {
            result.cancelled = true;
            break;
        }
        std::vector<std::size_t> pool = select_parents(fitness, ga, pool_size, rng);
        std::shuffle(pool.begin(), pool.end(), rng);

        std::vector<Individual> offspring;
        offspring.reserve(pool.size());
        std::size_t j = 0;
        for (; j + 1 < pool.size(); j += 2) {
            const Individual& a = pop[pool[j]];
            const Individual& b = pop[pool[j + 1]];
            if (cross(rng)) {
                auto [c1, c2] = crossover_pair(a, b, rng);
                offspring.push_back(std::move(c1));
                offspring.push_back(std::move(c2));
            } else {
                offspring.push_back(a);
                offspring.push_back(b);
            }
        }
        if (j < pool.size()) offspring.push_back(pop[pool[j]]);

        for (Individual& child : offspring) {
            child = mutate(child, space, ga.mutation_coefficient, rng);
            evaluate(child);
        }
        pop.insert(pop.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
        fitness = fitness_of(pop);
        keep(pop, survivor_select(fitness, ga.population_size));
        fitness = fitness_of(pop);
        record(g);
    }

    result.best_fitness = fitness.front();
    result.best_plan = decode(seed, pop.front());
    return result;
}

} // namespace dribbleforge
