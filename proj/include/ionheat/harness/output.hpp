#pragma once

// CSV emission. Every file starts with '#' comment lines carrying the
// configuration hash and master seed, then a plain CSV table.

#include <iomanip>
#include <ostream>
#include <string>

#include "ionheat/harness/config.hpp"
#include "ionheat/harness/ensemble.hpp"
#include "ionheat/units.hpp"

namespace ionheat {

inline void write_provenance(std::ostream& os, const ExperimentConfig& c) {
    os << "# preset " << c.preset << (c.preset == "paper" ? "" : " (desk-scale defaults, not the full protocol)") << "\n"
       << "# config_hash " << hex64(config_hash(c)) << "\n"
       << "# master_seed " << c.master_seed() << "\n"
       << std::setprecision(10) << "# n_ions " << c.n_ions() << "\n"
       << "# aspect_ratio " << c.alpha() << "\n"
       << "# dt " << c.schedule.dt << "\n"
       << "# t_end " << c.schedule.t_end << "\n"
       << "# trajectories " << c.trajectories << "\n"
       << "# window " << c.window.start << " " << c.window.end << "\n";
}

inline void write_statistics_csv(std::ostream& os, const ExperimentConfig& c, const EnsembleResult& r) {
    write_provenance(os, c);
    os << "# failed_trajectories " << r.failures.size() << "\n";
    for (const auto& f : r.failures) os << "#   trajectory " << f.index << ": " << f.reason << "\n";
    if (!r.statistics) {
        os << "# no statistics (run incomplete or every trajectory failed)\n";
        return;
    }
    const auto& st = *r.statistics;
    const auto rep = steady_state_check(st);
    const auto params = c.params();
    os << std::setprecision(17);
    os << "# flux_direct " << st.flux_direct[0].mean << " " << st.flux_direct[0].std_error << " "
       << st.flux_direct[1].mean << " " << st.flux_direct[1].std_error << "\n";
    os << "# flux_novikov " << st.flux_novikov[0].mean << " " << st.flux_novikov[0].std_error << " "
       << st.flux_novikov[1].mean << " " << st.flux_novikov[1].std_error << "\n";
    os << "# steady_state " << (rep.steady() ? "met" : "unmet") << " residuals=" << (rep.residuals_ok ? "ok" : "fail")
       << " flux_agreement_sigma=" << rep.flux_discrepancy_sigma << "\n";
    os << "ion,mean_x,mean_x_se,mean_y,mean_y_se,temperature,temperature_se,temperature_K,temperature_K_se,"
          "bath_current,bath_current_se,residual,residual_se\n";
    for (std::size_t i = 0; i < st.temperature.size(); ++i) {
        const auto& t = st.temperature[i];
        os << i + 1 << ',' << st.mean_x[i].mean << ',' << st.mean_x[i].std_error << ',' << st.mean_y[i].mean << ','
           << st.mean_y[i].std_error << ',' << t.mean << ',' << t.std_error << ','
           << temperature_to_kelvin(params, std::max(0.0, t.mean)) << ','
           << temperature_to_kelvin(params, t.std_error) << ',' << st.bath_current[i].mean << ','
           << st.bath_current[i].std_error << ',' << st.residual[i].mean << ',' << st.residual[i].std_error << '\n';
    }
}

} // namespace ionheat
