#include "qps/ecm.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qps::ecm {

namespace {

std::string issues_to_message(const std::vector<ValidationIssue>& issues) {
    std::ostringstream out;
    out << "network validation failed:";
    for (const auto& issue : issues) {
        out << "\n  - " << issue.message;
    }
    return out.str();
}

} // namespace

NetworkValidationError::NetworkValidationError(std::vector<ValidationIssue> issues)
    : Error(issues_to_message(issues)), issues_(std::move(issues)) {}

ZeroStationaryEntry::ZeroStationaryEntry(int index)
    : Error("stationary distribution entry " + std::to_string(index) + " is zero"), index_(index) {}

NotAnAction::NotAnAction(int id) : Error("clip " + std::to_string(id) + " is not an action clip") {}

ClipNetwork::ClipNetwork(Matrix p, std::vector<Clip> clips) : p_(std::move(p)), clips_(std::move(clips)) {
    auto issues = check_network(p_, clips_);
    if (!issues.empty()) {
        throw NetworkValidationError(std::move(issues));
    }
}

const Clip& ClipNetwork::clip(int id) const {
    if (id < 1 || id > size()) {
        throw Error("clip id " + std::to_string(id) + " out of range");
    }
    return clips_[static_cast<std::size_t>(id - 1)];
}

bool ClipNetwork::is_action(int id) const {
    return clip(id).kind == ClipKind::action;
}

std::vector<int> ClipNetwork::action_ids() const {
    std::vector<int> ids;
    for (const auto& c : clips_) {
        if (c.kind == ClipKind::action) {
            ids.push_back(c.id);
        }
    }
    return ids;
}

std::vector<ValidationIssue> check_network(const Matrix& p, const std::vector<Clip>& clips) {
    std::vector<ValidationIssue> issues;
    const auto n = static_cast<Eigen::Index>(clips.size());

    if (p.rows() != p.cols() || p.rows() != n) {
        std::ostringstream msg;
        msg << "DimensionMismatch: matrix is " << p.rows() << "x" << p.cols() << " but clip count is "
            << n;
        issues.push_back({ValidationIssue::Code::dimension_mismatch, 0, 0.0, msg.str()});
        return issues; // column checks are meaningless on a mis-shaped matrix
    }

    for (Eigen::Index i = 0; i < n; ++i) {
        if (clips[static_cast<std::size_t>(i)].id != static_cast<int>(i) + 1) {
            issues.push_back({ValidationIssue::Code::bad_clip_ids, static_cast<int>(i) + 1, 0.0,
                              "BadClipIds: ids must be contiguous from 1"});
            break;
        }
    }

    for (Eigen::Index j = 0; j < n; ++j) {
        const double sum = p.col(j).sum();
        const bool entries_ok = p.col(j).minCoeff() >= 0.0 && p.col(j).maxCoeff() <= 1.0 + kStochasticTol;
        if (!entries_ok || std::abs(sum - 1.0) > kStochasticTol) {
            std::ostringstream msg;
            msg << "NonStochasticColumn(" << j + 1 << ", " << sum << ")";
            issues.push_back({ValidationIssue::Code::non_stochastic_column, static_cast<int>(j) + 1, sum,
                              msg.str()});
        }
    }

    const bool has_action = std::any_of(clips.begin(), clips.end(),
                                        [](const Clip& c) { return c.kind == ClipKind::action; });
    if (!has_action) {
        issues.push_back({ValidationIssue::Code::no_action_clips, 0, 0.0, "NoActionClips"});
    }
    return issues;
}

ClipNetwork validate_network(const Matrix& p, const std::vector<Clip>& clips) {
    return ClipNetwork(p, clips);
}

Matrix renormalize_columns(const Matrix& p) {
    Matrix out = p;
    for (Eigen::Index j = 0; j < out.cols(); ++j) {
        const double sum = out.col(j).sum();
        if (sum <= 0.0) {
            throw Error("renormalize_columns: column " + std::to_string(j + 1) + " has non-positive sum");
        }
        out.col(j) /= sum;
    }
    return out;
}

Matrix time_reversed(const Matrix& p, const Vector& pi) {
    if (p.rows() != p.cols() || p.rows() != pi.size()) {
        throw DimensionMismatch("time_reversed: matrix/vector dimensions disagree");
    }
    for (Eigen::Index i = 0; i < pi.size(); ++i) {
        if (pi(i) <= 0.0) {
            throw ZeroStationaryEntry(static_cast<int>(i) + 1);
        }
    }
    Matrix out(p.rows(), p.cols());
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            out(i, j) = p(j, i) * pi(i) / pi(j);
        }
    }
    return out;
}

FlagSet::FlagSet(std::vector<int> action_ids) : actions_(std::move(action_ids)) {
    if (actions_.empty()) {
        throw Error("FlagSet: a network must have at least one action clip");
    }
    flagged_.insert(actions_.begin(), actions_.end());
}

bool FlagSet::is_action(int id) const {
    return std::find(actions_.begin(), actions_.end(), id) != actions_.end();
}

FlagSet flag_update(const FlagSet& flags, int chosen, bool rewarded) {
    if (!flags.is_action(chosen)) {
        throw NotAnAction(chosen);
    }
    if (rewarded) {
        return flags;
    }
    FlagSet out = flags;
    out.flagged_.erase(chosen);
    if (out.flagged_.empty()) {
        out.flagged_.insert(out.actions_.begin(), out.actions_.end()); // all flags are re-set
    }
    return out;
}

HValues::HValues(int n_percepts, int n_actions, double floor) : floor_(floor) {
    if (n_percepts < 1 || n_actions < 1) {
        throw Error("HValues: need at least one percept and one action");
    }
    h_ = Matrix::Constant(n_actions, n_percepts, floor);
}

HValues::HValues(Matrix h, double floor) : h_(std::move(h)), floor_(floor) {
    if ((h_.array() < floor_).any()) {
        throw Error("HValues: entries below floor");
    }
}

double HValues::value(int percept, int action) const {
    if (percept < 0 || percept >= n_percepts() || action < 0 || action >= n_actions()) {
        throw UnknownPerceptOrAction("HValues: percept/action index out of range");
    }
    return h_(action, percept);
}

Vector HValues::probabilities(int percept) const {
    if (percept < 0 || percept >= n_percepts()) {
        throw UnknownPerceptOrAction("HValues: percept index out of range");
    }
    Vector col = h_.col(percept);
    return col / col.sum();
}

HValues learn_update(const HValues& h, int percept, int action, double reward,
                     const LearnParams& params) {
    if (percept < 0 || percept >= h.n_percepts() || action < 0 || action >= h.n_actions()) {
        throw UnknownPerceptOrAction("learn_update: percept/action index out of range");
    }
    if (reward < 0.0) {
        throw Error("learn_update: reward must be non-negative");
    }
    HValues out = h;
    const double old = out.h_(action, percept);
    out.h_(action, percept) =
        std::max(out.floor_, old + params.lambda * reward - params.gamma * (old - out.floor_));
    return out;
}

ClipNetwork read_network(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error("network parse: missing dimension line");
    }
    std::istringstream head(line);
    int n = 0;
    if (!(head >> n) || n < 1) {
        throw Error("network parse: bad dimension line '" + line + "'");
    }
    std::string extra;
    if (head >> extra) {
        throw Error("network parse: trailing token on dimension line");
    }

    Matrix p(n, n);
    for (int i = 0; i < n; ++i) {
        if (!std::getline(in, line)) {
            throw Error("network parse: missing matrix row " + std::to_string(i + 1));
        }
        std::istringstream row(line);
        for (int j = 0; j < n; ++j) {
            if (!(row >> p(i, j))) {
                throw Error("network parse: bad entry at row " + std::to_string(i + 1) + ", column " +
                            std::to_string(j + 1));
            }
        }
        if (row >> extra) {
            throw Error("network parse: trailing token on matrix row " + std::to_string(i + 1));
        }
    }

    if (!std::getline(in, line)) {
        throw Error("network parse: missing action id line");
    }
    std::istringstream tail(line);
    std::vector<Clip> clips;
    clips.reserve(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        clips.push_back({i, ClipKind::internal, "c" + std::to_string(i)});
    }
    int id = 0;
    bool any = false;
    while (tail >> id) {
        if (id < 1 || id > n) {
            throw Error("network parse: action id " + std::to_string(id) + " out of range");
        }
        clips[static_cast<std::size_t>(id - 1)].kind = ClipKind::action;
        any = true;
    }
    if (!tail.eof()) {
        throw Error("network parse: bad token on action id line");
    }
    if (!any) {
        throw Error("network parse: empty action id line");
    }
    return ClipNetwork(std::move(p), std::move(clips));
}

ClipNetwork read_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open network file '" + path + "'");
    }
    return read_network(in);
}

void write_network(std::ostream& out, const ClipNetwork& network) {
    const int n = network.size();
    out << n << "\n";
    char buf[32];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", network.matrix()(i, j));
            out << (j ? " " : "") << buf;
        }
        out << "\n";
    }
    bool first = true;
    for (int id : network.action_ids()) {
        out << (first ? "" : " ") << id;
        first = false;
    }
    out << "\n";
}

} // namespace qps::ecm
