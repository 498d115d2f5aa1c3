// Copyright 2026 The prefalign Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <sstream>

#include "prefalign/error.hpp"
#include "prefalign/eval/eval.hpp"
#include "prefalign/util/format.hpp"

namespace prefalign::eval {

namespace {

std::string mark(const CompareRow& r) {
  if (!r.test) return "";
  std::string m = r.test->significant ? "*" : "";
  if (r.test->degenerate_variance) m += "!";
  return m;
}

std::string p_text(const CompareRow& r) { return r.test ? util::fmt_fixed(r.test->p_one_tailed, 4) : "n/a"; }

}  // namespace

Comparison compare_report(const EvalReport& a, const EvalReport& b, double alpha) {
  if (a.segment_ids != b.segment_ids) throw InputError("reports cover different segments");
  if (a.pivot != b.pivot) throw InputError("reports use different pivot languages");
  if (a.metrics.size() != b.metrics.size()) throw InputError("reports cover different metrics");
  Comparison cmp;
  cmp.system_a = a.system;
  cmp.system_b = b.system;
  cmp.alpha = alpha;

  std::map<std::string, std::vector<std::size_t>> by_lp;
  for (std::size_t i = 0; i < a.lang_pairs.size(); ++i) by_lp[a.lang_pairs[i]].push_back(i);

  for (std::size_t k = 0; k < a.metrics.size(); ++k) {
    const MetricReport& ma = a.metrics[k];
    const MetricReport& mb = b.metric(ma.metric);
    auto add = [&](const std::string& group, double va, double vb,
                   const std::vector<std::size_t>& idx) {
      CompareRow row{group, ma.metric, va, vb, vb - va, std::nullopt};
      if (idx.size() >= 2) {
        std::vector<double> sa;
        std::vector<double> sb;
        for (auto i : idx) {
          sa.push_back(ma.segment_scores[i]);
          sb.push_back(mb.segment_scores[i]);
        }
        row.test = paired_t_test(sb, sa, alpha);
      }
      cmp.rows.push_back(std::move(row));
    };
    for (const auto& [lp, idx] : by_lp) add(lp, ma.per_lang_pair.at(lp), mb.per_lang_pair.at(lp), idx);
    for (const auto& [d, va] : ma.per_direction) {
      std::vector<std::size_t> idx;
      for (const auto& [lp, lp_idx] : by_lp) {
        const auto sep = lp.find('-');
        const corpus::LangPair pair{lp.substr(0, sep), lp.substr(sep + 1)};
        if (pair.direction(a.pivot) == d) idx.insert(idx.end(), lp_idx.begin(), lp_idx.end());
      }
      std::sort(idx.begin(), idx.end());
      add(direction_label(d, a.pivot), va, mb.per_direction.at(d), idx);
    }
  }
  return cmp;
}

std::string Comparison::to_csv() const {
  std::ostringstream out;
  out << "group,metric,value_a,value_b,delta,t,df,p_one_tailed,significant,degenerate_variance\n";
  for (const auto& r : rows) {
    out << r.group << ',' << r.metric << ',' << util::fmt_fixed(r.value_a, 4) << ','
        << util::fmt_fixed(r.value_b, 4) << ',' << util::fmt_fixed(r.delta, 4) << ',';
    if (r.test) {
      out << util::fmt_fixed(r.test->t, 4) << ',' << r.test->df << ','
          << util::fmt_fixed(r.test->p_one_tailed, 6) << ',' << (r.test->significant ? 1 : 0)
          << ',' << (r.test->degenerate_variance ? 1 : 0);
    } else {
      out << ",,,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string Comparison::to_text() const {
  const std::vector<std::string> header = {"group", "metric", system_a, system_b, "delta", "p", ""};
  std::vector<std::vector<std::string>> table;
  for (const auto& r : rows) {
    const std::string delta = (r.delta > 0 ? "+" : "") + util::fmt_fixed(r.delta, 2);
    table.push_back({r.group, r.metric, util::fmt_fixed(r.value_a, 2),
                     util::fmt_fixed(r.value_b, 2), delta, p_text(r), mark(r)});
  }
  std::vector<std::size_t> width(header.size());
  for (std::size_t c = 0; c < header.size(); ++c) {
    width[c] = header[c].size();
    for (const auto& row : table) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& row) {
    std::string line;
    for (std::size_t c = 0; c < row.size(); ++c) {
      const std::size_t pad = width[c] - row[c].size();
      // text columns left-aligned, numbers right-aligned
      if (c < 2 || c == row.size() - 1) {
        line += row[c] + std::string(pad, ' ');
      } else {
        line += std::string(pad, ' ') + row[c];
      }
      if (c + 1 < row.size()) line += "  ";
    }
    while (!line.empty() && line.back() == ' ') line.pop_back();
    out << line << '\n';
  };
  emit(header);
  std::size_t total = 0;
  for (auto w : width) total += w + 2;
  out << std::string(total - 2, '-') << '\n';
  for (const auto& row : table) emit(row);
  out << "\n* one-tailed paired t-test of " << system_b << " > " << system_a
      << " on segment-level scores, alpha = " << util::fmt_double(alpha)
      << "\n! all segment differences equal (zero variance)\n"
      << "Group values use each metric's native aggregation; the tests always pair segment "
         "scores.\n";
  return out.str();
}

}  // namespace prefalign::eval
