#pragma once

#include <cstddef>
#include <iosfwd>
#include <utility>
#include <vector>

#include "xbarsim/crossbar.hpp"

namespace xbarsim {

struct FormingSpec {
    double i_start = 180 * uA;
    double i_stop = 540 * uA;
    double i_step = 20 * uA;
    double r_min_ratio = 5.0;
    double v_reset = -1.3;
    double r_th = 200 * kOhm;  // pristine threshold at v_check
    int max_attempts = 19;
    int max_rounds = 2;
    double ceiling_escalation = 1.25;  // applied per extra round

    double v_check = 0.1;
    double v_form = 2.0;  // formed conductance = ceiling / v_form
    // post-forming reset drives the device down to this conductance
    double g_low = 10 * uS;
    double v_reset_limit = -1.8;
    double reset_step = 0.1;
    int max_reset_pulses = 2000;

    void validate() const;
};

enum class FormingStatus { preformed, formed, defective };

const char* to_string(FormingStatus s);

struct FormingOutcome {
    std::size_t row = 0;
    std::size_t col = 0;
    FormingStatus status = FormingStatus::preformed;
    int attempts_used = 0;
    std::vector<std::pair<double, double>> trace;  // (sweep ceiling, current ratio)
};

struct FormingReport {
    std::vector<FormingOutcome> outcomes;
    double defective_fraction() const;
};

// Pulses the device toward the low-conductance state; returns the number of pulses used.
int reset_to_low(MemristorDevice& d, const FormingSpec& spec);

FormingOutcome form_device(Crossbar& xbar, std::size_t row, std::size_t col, const FormingSpec& spec);

FormingReport form_all(Crossbar& xbar, const std::vector<std::pair<std::size_t, std::size_t>>& targets,
                       const FormingSpec& spec);

std::vector<std::pair<std::size_t, std::size_t>> all_cells(const Crossbar& xbar);

void write_report_json(std::ostream& os, const FormingReport& report);

}  // namespace xbarsim
