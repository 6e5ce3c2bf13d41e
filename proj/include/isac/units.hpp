#pragma once

#include <cmath>

namespace isac::units {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

inline double dbsm_to_m2(double dbsm) { return db_to_linear(dbsm); }
inline double m2_to_dbsm(double m2) { return linear_to_db(m2); }

inline double dbm_to_watt(double dbm) { return db_to_linear(dbm - 30.0); }
inline double watt_to_dbm(double w) { return linear_to_db(w) + 30.0; }

// PSD in dBm/Hz <-> W/Hz
inline double dbm_per_hz_to_watt_per_hz(double v) { return dbm_to_watt(v); }
inline double watt_per_hz_to_dbm_per_hz(double v) { return watt_to_dbm(v); }

}  // namespace isac::units
