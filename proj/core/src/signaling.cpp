#include "contexcert/signaling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "contexcert/error.hpp"

namespace contexcert {

namespace {

// Marginal of `observable` as (value -> probability), values in table order.
std::vector<std::pair<Outcome, double>> marginal_of(const ProbTable& table,
                                                    const std::string& observable) {
  const std::vector<std::string> keep{observable};
  const auto m = marginalize(table, keep);
  std::vector<std::pair<Outcome, double>> out;
  for (std::size_t i = 0; i < m.cell_count(); ++i) out.emplace_back(m.cell(i)[0], m.probs()[i]);
  std::sort(out.begin(), out.end());
  return out;
}

double prob_of(const std::vector<std::pair<Outcome, double>>& m, Outcome v) {
  for (const auto& [value, p] : m) {
    if (value == v) return p;
  }
  return 0.0;
}

std::vector<Outcome> union_values(const std::vector<std::pair<Outcome, double>>& a,
                                  const std::vector<std::pair<Outcome, double>>& b) {
  std::vector<Outcome> values;
  for (const auto& [v, _] : a) values.push_back(v);
  for (const auto& [v, _] : b) values.push_back(v);
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::vector<std::vector<std::pair<Outcome, double>>> marginals_for(
    std::span<const ProbTable> tables, const std::string& observable) {
  std::vector<std::vector<std::pair<Outcome, double>>> marginals;
  for (const auto& t : tables) {
    if (t.position(observable)) marginals.push_back(marginal_of(t, observable));
  }
  if (marginals.empty()) {
    throw Error(ErrorCode::ObservableNotFound, "'" + observable + "' is in no table support");
  }
  if (marginals.size() < 2) {
    throw Error(ErrorCode::FewerThanTwoContexts, "'" + observable + "' appears in one context only");
  }
  return marginals;
}

std::string join_ids(const std::vector<std::string>& ids) {
  std::string out;
  for (const auto& id : ids) {
    if (!out.empty()) out += '+';
    out += id;
  }
  return out;
}

}  // namespace

std::string describe(const TolerancePolicy& policy) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* f = std::get_if<FixedTolerance>(&policy)) {
    os << "fixed:" << f->epsilon;
  } else {
    os << "k-sigma:" << std::get<StatisticalTolerance>(policy).k;
  }
  return os.str();
}

std::string_view to_string(SignalingVerdict v) {
  return v == SignalingVerdict::no_signaling ? "no_signaling" : "signaling";
}

double signaling_deviation(std::span<const ProbTable> tables, const std::string& observable) {
  const auto marginals = marginals_for(tables, observable);
  double worst = 0.0;
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    for (std::size_t j = i + 1; j < marginals.size(); ++j) {
      for (Outcome v : union_values(marginals[i], marginals[j])) {
        worst = std::max(worst, std::abs(prob_of(marginals[i], v) - prob_of(marginals[j], v)));
      }
    }
  }
  return worst;
}

double signaling_total_variation(std::span<const ProbTable> tables,
                                 const std::string& observable) {
  const auto marginals = marginals_for(tables, observable);
  double worst = 0.0;
  for (std::size_t i = 0; i < marginals.size(); ++i) {
    for (std::size_t j = i + 1; j < marginals.size(); ++j) {
      double l1 = 0.0;
      for (Outcome v : union_values(marginals[i], marginals[j])) {
        l1 += std::abs(prob_of(marginals[i], v) - prob_of(marginals[j], v));
      }
      worst = std::max(worst, 0.5 * l1);
    }
  }
  return worst;
}

SignalingReport no_signaling_test(const Dataset& dataset, const TolerancePolicy& policy) {
  std::vector<ProbTable> tables;
  for (const auto& setting : dataset.settings()) tables.push_back(estimate_table(dataset, setting));

  SignalingReport report;
  report.policy = policy;
  if (const auto* f = std::get_if<FixedTolerance>(&policy)) report.tolerance_used = f->epsilon;

  for (const auto& obs : dataset.scenario().observables()) {
    std::vector<std::size_t> holders;
    for (std::size_t t = 0; t < tables.size(); ++t) {
      if (tables[t].position(obs.id)) holders.push_back(t);
    }
    if (holders.size() < 2) continue;

    ObservableSignaling summary;
    for (std::size_t h : holders) summary.contexts.push_back(tables[h].support());

    for (std::size_t i = 0; i < holders.size(); ++i) {
      for (std::size_t j = i + 1; j < holders.size(); ++j) {
        const auto& ta = tables[holders[i]];
        const auto& tb = tables[holders[j]];
        const std::vector<ProbTable> pair{ta, tb};
        const auto ma = marginal_of(ta, obs.id);
        const auto mb = marginal_of(tb, obs.id);
        const double na = static_cast<double>(ta.sample_size().value_or(0));
        const double nb = static_cast<double>(tb.sample_size().value_or(0));

        ContextComparison cmp;
        cmp.observable = obs.id;
        cmp.context_a = ta.support();
        cmp.context_b = tb.support();
        cmp.total_variation = signaling_total_variation(pair, obs.id);
        bool first = true;
        for (Outcome v : union_values(ma, mb)) {
          const double pa = prob_of(ma, v);
          const double pb = prob_of(mb, v);
          const double gap = std::abs(pa - pb);
          double tol = 0.0;
          if (const auto* f = std::get_if<FixedTolerance>(&policy)) {
            tol = f->epsilon;
          } else {
            const double k = std::get<StatisticalTolerance>(policy).k;
            const double pooled = (pa * na + pb * nb) / (na + nb);
            tol = k * std::sqrt(pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb));
          }
          if (gap > tol) cmp.within_tolerance = false;
          if (first || gap > cmp.deviation) {
            cmp.deviation = gap;
            cmp.tolerance = tol;
            first = false;
          }
        }
        if (std::holds_alternative<StatisticalTolerance>(policy)) {
          report.tolerance_used = std::max(report.tolerance_used, cmp.tolerance);
        }
        summary.deviation = std::max(summary.deviation, cmp.deviation);
        summary.total_variation = std::max(summary.total_variation, cmp.total_variation);
        if (!cmp.within_tolerance) report.verdict = SignalingVerdict::signaling;
        report.comparisons.push_back(std::move(cmp));
      }
    }
    report.per_observable.emplace(obs.id, std::move(summary));
  }

  if (report.comparisons.empty()) {
    std::string contexts;
    for (const auto& s : dataset.settings()) contexts += " " + join_ids(s);
    throw Error(ErrorCode::NoSharedObservables, "no observable is shared between contexts:" + contexts);
  }
  return report;
}

}  // namespace contexcert
