#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "speclab/harness.hpp"
#include "speclab/sharpness.hpp"

namespace speclab {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_number(double v);

/// Column order of records.csv.
const std::vector<std::string>& record_columns();

void write_records_csv(std::ostream& out, const std::vector<InequalityRecord>& records);
void write_aggregates_csv(std::ostream& out, const std::vector<Aggregate>& aggregates);
void write_stability_csv(std::ostream& out, const std::vector<StabilityRow>& rows);
void write_fits_csv(std::ostream& out, const std::vector<ExponentFit>& fits);

/// JSON mirror of a sweep: records with notes, aggregates, failures, and per
/// domain the extrapolated spectra and witness configurations.
void write_sweep_json(std::ostream& out, const SweepReport& report,
                      const std::vector<StabilityRow>& stability = {});
void write_fits_json(std::ostream& out, const std::vector<ExponentFit>& fits, const std::optional<DoublingFit>& doubling);

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
  /// draw y = slope x + intercept across the series' x range
  std::optional<LineFit> line;
};

struct Plot {
  std::string title;
  std::string x_label, y_label;
  bool log_x = false, log_y = false;
  std::vector<PlotSeries> series;
};

/// Self-contained SVG scatter plot; non-positive values are skipped on log
/// axes, non-finite values always.
std::string render_svg(const Plot& plot);

}  // namespace speclab
