#pragma once

#include <string>
#include <vector>

#include "msalab/msa.hpp"
#include "msalab/stats.hpp"

namespace msalab::report {

/// Shortest exact decimal: %.17g.
std::string fmt_g17(double v);

/// One CSV line from cells, no trailing newline.
std::string csv_line(const std::vector<std::string>& cells);

/// CubeReport as a stable-keyed JSON string (2-space indent, sorted keys).
std::string cube_report_json(const msa::CubeReport& rep);

/// Batch CSV for cube reports:
/// seed,sample,k,g,m,center,radius,n_policy,n_resonant,n_cnr,n_cnr_ns,good,
/// tunneling,multi_resonant,localized
std::string cube_report_csv_header();
std::string cube_report_csv_row(const msa::CubeReport& rep, std::uint64_t seed,
                                std::int64_t sample);

/// wegner.csv: s,count,n,p,ci_lo,ci_hi
std::string scaling_csv(const stats::ScalingFit& fit, const std::string& abscissa_name);

/// minami.csv: interval_len,J,count,n,p,ci_lo,ci_hi
std::string minami_csv(const stats::ScalingFit& fit, int j);

/// prob.csv: g,k,event,count,n,p,ci_lo,ci_hi
std::string prob_csv(const std::vector<stats::ProbRow>& rows);

/// spacing.csv: bin_lo,bin_hi,mass
std::string spacing_csv(const stats::SpacingHistogram& hist);

/// Fit summary as JSON (slope, intercept, CI, points used).
std::string fit_json(const stats::ScalingFit& fit);

/// Binary eigenvector dump: ascii header line
/// "msalab-evec v1 dim=<d> radius=<L> center=<c1,..> n=<N> seed=<s>\n"
/// followed by N*N float64 column-major eigenvector entries, then N float64
/// eigenvalues.
void write_eigenvector_dump(const std::string& path, const msa::Cube& cube,
                            const spectral::SpectralData& spec, std::uint64_t seed);

}  // namespace msalab::report
