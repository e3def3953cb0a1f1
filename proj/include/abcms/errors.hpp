#pragma once

#include <stdexcept>
#include <string>

namespace abcms {

struct insufficient_data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct dimension_mismatch_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct empty_posterior_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct singular_design_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct degenerate_scale_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct degenerate_curve_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct divergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct non_convergence_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct undefined_shape_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace abcms
