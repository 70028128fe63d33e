#include "alp/matcher.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "alp/comparison.hpp"
#include "alp/dc_metadata.hpp"
#include "alp/textnorm.hpp"

namespace alp::matcher {

namespace {

std::optional<std::string> present(std::optional<std::string> v) {
  if (v && textnorm::trim(*v).empty()) return std::nullopt;
  return v;
}

double jaccard_text(const std::string& a, const std::string& b) {
  return textnorm::jaccard(textnorm::token_set(a), textnorm::token_set(b));
}

bool ranks_before(const ScoredCandidate& a, const ScoredCandidate& b) {
  if (a.scores.total != b.scores.total) return a.scores.total > b.scores.total;
  const auto pa = to_string(a.candidate.provider);
  const auto pb = to_string(b.candidate.provider);
  if (pa != pb) return pa < pb;
  if (a.candidate.provider_record_id != b.candidate.provider_record_id) {
    return a.candidate.provider_record_id < b.candidate.provider_record_id;
  }
  // Same provider and id: fall back on the remaining fields so that the
  // order never depends on input order.
  auto rest = [](const ProviderRecord& r) {
    return std::tie(r.access_url, r.title, r.creator, r.date, r.publisher);
  };
  return rest(a.candidate) < rest(b.candidate);
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::ExactEdition: return "exact_edition";
    case Verdict::ApproximateEdition: return "approximate_edition";
    case Verdict::NoMatch: return "no_match";
  }
  return "no_match";
}

Scores score_candidate(const BibRecord& record, const ProviderRecord& candidate,
                       const MatchConfig& config) {
  Scores s;
  const std::string title = record.first("title").value_or("");
  const auto cand_title = present(candidate.title);
  s.title_sim = cand_title ? jaccard_text(title, *cand_title) : 0.0;

  const auto creator = present(record.first("creator"));
  const auto cand_creator = present(candidate.creator);
  if (!creator || !cand_creator) {
    s.creator_sim = config.neutral;
  } else {
    const std::string a = comparison::surname(*creator);
    const std::string b = comparison::surname(*cand_creator);
    s.creator_sim = !a.empty() && a == b ? 1.0 : jaccard_text(*creator, *cand_creator);
  }

  const auto date = present(record.first("date"));
  const auto cand_date = present(candidate.date);
  const auto year = date ? textnorm::extract_year(*date) : std::nullopt;
  const auto cand_year = cand_date ? textnorm::extract_year(*cand_date) : std::nullopt;
  const int delta = year && cand_year ? std::abs(year.value() - cand_year.value()) : -1;
  if (delta < 0) {
    s.year_score = config.neutral;
  } else if (delta == 0) {
    s.year_score = 1.0;
    s.years_equal = true;
  } else if (delta <= config.near_year_window) {
    s.year_score = 0.5;
  } else {
    s.year_score = 0.0;
  }

  const auto publisher = present(record.first("publisher"));
  const auto cand_publisher = present(candidate.publisher);
  s.publisher_sim = publisher && cand_publisher ? jaccard_text(*publisher, *cand_publisher)
                                                : config.neutral;

  s.total = config.w_title * s.title_sim + config.w_creator * s.creator_sim +
            config.w_year * s.year_score + config.w_publisher * s.publisher_sim;
  return s;
}

MatchReport classify(const BibRecord& record, std::vector<ProviderRecord> candidates,
                     const MatchConfig& config) {
  MatchReport report;
  for (auto& c : candidates) {
    Scores s = score_candidate(record, c, config);
    report.candidates.push_back({std::move(c), s});
  }
  std::sort(report.candidates.begin(), report.candidates.end(), ranks_before);
  if (report.candidates.empty()) return report;

  const Scores& best = report.candidates.front().scores;
  if (best.title_sim >= config.exact_title && best.creator_sim >= config.exact_creator &&
      best.years_equal && best.publisher_sim >= config.exact_publisher) {
    report.verdict = Verdict::ExactEdition;
  } else if (best.total >= config.approx_total && best.title_sim >= config.approx_title) {
    report.verdict = Verdict::ApproximateEdition;
  }
  if (report.verdict != Verdict::NoMatch) report.chosen = 0;
  return report;
}

BibRecord attach_surrogate(BibRecord record, const MatchReport& report) {
  const ScoredCandidate* chosen = report.chosen_candidate();
  if (report.verdict == Verdict::NoMatch || !chosen) {
    throw PreconditionError("cannot attach a surrogate for a no_match verdict");
  }
  const auto& c = chosen->candidate;
  const bool present_already =
      std::any_of(record.surrogates.begin(), record.surrogates.end(), [&](const auto& s) {
        return s.provider == c.provider && s.provider_record_id == c.provider_record_id;
      });
  if (present_already) return record;
  record.surrogates.push_back(DigitalSurrogate{
      c.provider, c.provider_record_id, c.access_url,
      report.verdict == Verdict::ExactEdition ? MatchLevel::ExactEdition
                                              : MatchLevel::ApproximateEdition,
      chosen->scores.total});
  return record;
}

std::string format_score(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

std::string report_csv_row(std::string_view record_id, const MatchReport& report) {
  std::vector<std::string> f{std::string(record_id)};
  if (report.candidates.empty()) {
    f.insert(f.end(), 7, "");
  } else {
    const auto& best = report.candidates.front();
    f.emplace_back(to_string(best.candidate.provider));
    f.push_back(best.candidate.provider_record_id);
    for (double v : {best.scores.title_sim, best.scores.creator_sim, best.scores.year_score,
                     best.scores.publisher_sim, best.scores.total}) {
      f.push_back(format_score(v));
    }
  }
  f.emplace_back(to_string(report.verdict));
  return dc::csv_line(f);
}

std::string provider_error_csv_row(std::string_view record_id, Provider provider) {
  std::vector<std::string> f{std::string(record_id), std::string(to_string(provider))};
  f.insert(f.end(), 6, "");
  f.emplace_back("provider_error");
  return dc::csv_line(f);
}

}  // namespace alp::matcher
