#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "srcpool/eval.hpp"

namespace srcpool {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Column names of the experiment CSV, in order.
std::span<const std::string_view> report_columns();

/// One header line, then one row per report. Missing values are empty cells;
/// eigenvalue arrays are ';'-separated.
void write_reports_csv(std::ostream& out, std::span<const ExperimentReport> reports);

/// `epoch,loss` rows.
void write_loss_curve_csv(std::ostream& out, std::span<const double> curve);

/// `operator,n,k,storage` rows followed by a `# slope` comment when a fit exists.
void write_storage_csv(std::ostream& out, std::span<const StorageProbe> probes);

/// Overlay of the spectra before (black) and after (blue) pooling, eigenvalue
/// indices rescaled to [0, 1].
void write_spectrum_svg(std::ostream& out, const ExperimentReport& report);

/// Loss curves, one polyline per labelled series, log-scaled y axis.
void write_loss_curves_svg(std::ostream& out,
                           std::span<const std::pair<std::string, std::vector<double>>> series);

std::string_view experiment_name(Experiment e);

}  // namespace srcpool
