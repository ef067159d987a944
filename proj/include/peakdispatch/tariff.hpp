#pragma once

// Tariff parameters: energy price, CP/5CP transmission-capacity rates, NCP
// demand rate, and the degradation penalty.

#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "peakdispatch/calendar.hpp"
#include "peakdispatch/errors.hpp"
#include "peakdispatch/series.hpp"

namespace peakdispatch {

struct TariffConfig {
  /// USD/MW at the season CP hour. In PSE&G terms this is the product of a
  /// zonal factor, 30 days, and a NITS rate in USD/day/MW, entered directly.
  double lambda_cp = 0.0;
  /// USD/MW per PJM 5CP hour; unset disables the capacity term.
  std::optional<double> lambda_5cp;
  /// USD/MW applied to each monthly non-coincident peak.
  double lambda_ncp = 0.0;
  /// USD per unit of hour-to-hour |dpi| change (depth-of-discharge proxy).
  double lambda_deg = 0.0;
  /// Flat energy price in USD/MWh, used when no price series is given.
  double flat_price = 0.0;
  /// Optional hourly price series (entity PRICE); overrides flat_price.
  std::optional<HourlySeries> price_series;
  /// CP season (business days within it are CP candidates).
  DateRange cp_season{};
  HolidayCalendar holidays{};

  void validate() const {
    if (lambda_cp < 0.0 || lambda_ncp < 0.0 || lambda_deg < 0.0)
      throw SpecError("tariff rates must be nonnegative");
    if (lambda_5cp && *lambda_5cp < 0.0) throw SpecError("lambda_5cp must be nonnegative");
    if (!(cp_season.start <= cp_season.end)) throw SpecError("cp_season is empty");
    if (!std::isfinite(flat_price)) throw SpecError("flat price must be finite");
  }

  /// Hourly prices for one day.
  std::array<double, 24> prices(const CivilDate& d,
                                DaySliceMode mode = DaySliceMode::kStrict) const {
    if (price_series) return price_series->day_slice(d, mode);
    std::array<double, 24> p{};
    p.fill(flat_price);
    return p;
  }

  bool cp_business_day(const CivilDate& d) const {
    return is_cp_business_day(d, cp_season, holidays);
  }
};

}  // namespace peakdispatch
