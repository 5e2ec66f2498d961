#pragma once

#include "qps/linalg.hpp"

#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace qps::ecm {

// Episodic-compositional memory: clip networks, their column-stochastic
// transition matrices, action flags, and the h-value learning rule.
//
// Matrix convention used throughout the project: columns are sources and
// rows are destinations, so entry (i, j) is the probability of stepping
// from clip j to clip i, and every column sums to one.

constexpr double kStochasticTol = 1e-12;

enum class ClipKind { percept, action, internal };

struct Clip {
    int id = 0; // 1-based, contiguous within a network
    ClipKind kind = ClipKind::internal;
    std::string label;
};

struct ValidationIssue {
    enum class Code { non_stochastic_column, no_action_clips, dimension_mismatch, bad_clip_ids };
    Code code;
    int column = 0;   // 1-based, for non_stochastic_column
    double value = 0.0;
    std::string message;
};

class NetworkValidationError : public Error {
  public:
    explicit NetworkValidationError(std::vector<ValidationIssue> issues);
    const std::vector<ValidationIssue>& issues() const { return issues_; }

  private:
    std::vector<ValidationIssue> issues_;
};

class ZeroStationaryEntry : public Error {
  public:
    explicit ZeroStationaryEntry(int index);
    int index() const { return index_; }

  private:
    int index_;
};

class NotAnAction : public Error {
  public:
    explicit NotAnAction(int id);
};

class UnknownPerceptOrAction : public Error {
  public:
    using Error::Error;
};

// A validated clip network: ids contiguous from 1, matrix column-stochastic
// within kStochasticTol, at least one action clip. Immutable once built.
class ClipNetwork {
  public:
    ClipNetwork(Matrix p, std::vector<Clip> clips); // validates, throws NetworkValidationError

    int size() const { return static_cast<int>(clips_.size()); }
    const Matrix& matrix() const { return p_; }
    const std::vector<Clip>& clips() const { return clips_; }
    const Clip& clip(int id) const;
    bool is_action(int id) const;
    std::vector<int> action_ids() const;

  private:
    Matrix p_;
    std::vector<Clip> clips_;
};

// Collects every violated constraint instead of stopping at the first.
std::vector<ValidationIssue> check_network(const Matrix& p, const std::vector<Clip>& clips);

// Returns the validated network, or throws NetworkValidationError carrying
// the full issue list.
ClipNetwork validate_network(const Matrix& p, const std::vector<Clip>& clips);

// Explicit renormalization helper: rescales every column to unit sum.
// Never applied implicitly anywhere in the library.
Matrix renormalize_columns(const Matrix& p);

// Time-reversed transition matrix p*_ij = p_ji * pi_i / pi_j. `pi` must be
// the stationary distribution of `p` with strictly positive entries.
Matrix time_reversed(const Matrix& p, const Vector& pi);

// Binary flags over the action clips of a network. The flagged set is never
// empty: removing the last flag re-sets all of them.
class FlagSet {
  public:
    explicit FlagSet(std::vector<int> action_ids); // initially all flagged

    const std::vector<int>& action_ids() const { return actions_; }
    const std::set<int>& flagged() const { return flagged_; }
    bool is_flagged(int id) const { return flagged_.count(id) > 0; }
    bool is_action(int id) const;
    std::size_t count() const { return flagged_.size(); }

  private:
    friend FlagSet flag_update(const FlagSet& flags, int chosen, bool rewarded);
    std::vector<int> actions_;
    std::set<int> flagged_;
};

// Rewarded: flags unchanged. Unrewarded: the chosen action's flag is removed;
// if that would empty the set, all flags are re-set instead.
FlagSet flag_update(const FlagSet& flags, int chosen, bool rewarded);

struct LearnParams {
    double lambda = 1.0; // reward scaling
    double gamma = 0.0;  // forgetting rate (config hook, default off)
};

// Per-(percept, action) non-negative weights with a floor. Column j holds
// the h-values of percept j; derived probabilities are the normalized column.
class HValues {
  public:
    HValues(int n_percepts, int n_actions, double floor = 1.0);
    HValues(Matrix h, double floor); // h is n_actions x n_percepts

    int n_percepts() const { return static_cast<int>(h_.cols()); }
    int n_actions() const { return static_cast<int>(h_.rows()); }
    double floor() const { return floor_; }
    double value(int percept, int action) const;
    const Matrix& values() const { return h_; }

    // Normalized column: the action distribution for one percept.
    Vector probabilities(int percept) const;

  private:
    friend HValues learn_update(const HValues& h, int percept, int action, double reward,
                                const LearnParams& params);
    Matrix h_;
    double floor_;
};

// h(percept, action) <- max(floor, h + lambda*reward - gamma*(h - floor)).
// Percept and action are 0-based indices into the HValues table.
HValues learn_update(const HValues& h, int percept, int action, double reward,
                     const LearnParams& params);

// Network import/export: first line N, then N rows of N space-separated
// decimals (column-stochastic), then one line listing the 1-based action
// clip ids. Parsing is strict; any deviation throws qps::Error.
ClipNetwork read_network(std::istream& in);
ClipNetwork read_network_file(const std::string& path);
void write_network(std::ostream& out, const ClipNetwork& network);

} // namespace qps::ecm
