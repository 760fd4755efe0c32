#pragma once

#include "dribbleforge/plan.hpp"

#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <span>
#include <stop_token>
#include <string_view>
#include <utility>
#include <vector>

namespace dribbleforge {

using Rng = std::mt19937_64;

enum class SelectionMethod { Roulette, Rank, Sus, Tournament };

std::string_view to_string(SelectionMethod m);
std::optional<SelectionMethod> parse_selection_method(std::string_view name);

struct GaConfig {
    std::size_t population_size = 40;
    std::size_t generation_count = 1000;
    double crossover_probability = 0.8;
    double parent_selection_probability = 0.6;
    SelectionMethod selection_method = SelectionMethod::Roulette;
    double mutation_coefficient = 4.0;
    double initial_mutation_coefficient = 4.0;
    std::uint64_t rng_seed = 1;

    /// Throws Error{InvalidConfig} naming the offending field.
    void validate() const;

    friend bool operator==(const GaConfig&, const GaConfig&) = default;
};

struct FitnessConfig {
    double alpha_user = 0.66;
    double beta_user = 0.33;
    double rho = std::numbers::pi;

    void validate() const;

    friend bool operator==(const FitnessConfig&, const FitnessConfig&) = default;
};

/// Per-node inputs of the node fitness.
struct NodeContext {
    double body_dir = 0.0;
    double ball_dir = 0.0;
    double body_rel_obs = 0.0; ///< bearing from the node to the obstacle
    double ball_rel_obs = 0.0; ///< that bearing relative to the ball direction, in (-pi, pi]
    double dist = 0.0;         ///< node distance to the obstacle
};

/// Flat parameter string: (acceleration, body_dir, ball_dir) per node.
struct Individual {
    std::vector<double> params;
    std::optional<double> fitness;
};

/// Per-entry bounds and mutation scale of an individual.
struct ParamSpace {
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<double> param_max; ///< mutation scale: max acceleration, pi for both angles

    static ParamSpace from_limits(const ParamLimits& limits, std::size_t node_count);

    std::size_t size() const { return lower.size(); }
};

struct GenerationStats {
    std::size_t generation = 0;
    double best = 0.0;
    double mean = 0.0;
    double worst = 0.0;

    friend bool operator==(const GenerationStats&, const GenerationStats&) = default;
};

struct EvolutionResult {
    TrajectoryPlan best_plan;
    double best_fitness = 0.0;
    std::vector<GenerationStats> history; ///< entry 0 is the initial population
    std::uint64_t rng_seed = 0;
    bool cancelled = false;
};

std::pair<double, double> coeff_alpha_beta(const FitnessConfig& cfg, double dist);

/// The node's geometry relative to the obstacle at the origin. Every
/// convention for the relative angles lives here.
NodeContext node_context(Point2 position, double body_dir, double ball_dir);

/// exp(desired / rho^2); always positive.
double node_fitness(const NodeContext& ctx, const FitnessConfig& cfg);

/// Sum of node fitnesses. Throws Error{LengthMismatch} unless
/// params.size() == 3 * layout.size().
double plan_fitness(std::span<const double> params, std::span<const Point2> layout, const FitnessConfig& cfg);

Individual encode(const TrajectoryPlan& plan);
TrajectoryPlan decode(const TrajectoryPlan& layout, const Individual& ind);

/// Standard normal draw clipped to [-1, 1].
double clipped_gaussian(Rng& rng);

/// out_k = clamp(in_k + param_max_k * grn_k * coeff / 100) with the given draws.
Individual mutate_with(const Individual& ind, const ParamSpace& space, double coeff, std::span<const double> grn);
Individual mutate(const Individual& ind, const ParamSpace& space, double coeff, Rng& rng);

/// Weighted-mean children for a fixed weight pair.
std::pair<Individual, Individual> crossover_with_weights(const Individual& a, const Individual& b, double wi, double wj);
/// Draws wi, wj uniformly from [0.8, 1.2], shared by every entry.
std::pair<Individual, Individual> crossover_pair(const Individual& a, const Individual& b, Rng& rng);

/// Population of cfg.population_size: the seed followed by mutants of it.
std::vector<Individual> init_population(const Individual& seed, const ParamSpace& space, const GaConfig& cfg,
                                        Rng& rng);

/// Indices of `count` parents drawn with replacement by cfg.selection_method.
/// Throws Error{EmptyPopulation} when fitnesses is empty.
std::vector<std::size_t> select_parents(std::span<const double> fitnesses, const GaConfig& cfg, std::size_t count,
                                        Rng& rng);

/// Indices of the n fittest, best first; equal fitness keeps the lower index first.
std::vector<std::size_t> survivor_select(std::span<const double> fitnesses, std::size_t n);

/// Tournament fills the pool to population_size; the other methods take
/// ceil(parent_selection_probability * population_size), at least 2.
std::size_t mating_pool_size(const GaConfig& cfg);

struct EvolveHooks {
    std::function<void(const GenerationStats&)> on_generation;
    std::stop_token stop;
};

/// Runs the generational loop from the seed plan. Deterministic for a given
/// rng_seed. A stop request ends the run at the next generation boundary with
/// the history so far and `cancelled` set.
EvolutionResult evolve(const TrajectoryPlan& seed, const GaConfig& ga, const FitnessConfig& fit,
                       const EvolveHooks& hooks = {});

} // namespace dribbleforge
