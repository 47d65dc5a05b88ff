#pragma once

#include "renvol/bolza_context.hpp"
#include "renvol/report.hpp"
#include "renvol/scene.hpp"

#include <memory>

namespace renvol {

/// Suites in the order `verify --suite all` runs them.
const std::vector<std::string>& suite_names();

/// Runs verification suites over one scene. The Bolza context (group ball,
/// mesh, differentials) is built on first use and shared by every suite.
class SuiteRunner {
public:
    explicit SuiteRunner(Scene scene);

    /// One suite by name, or every suite for "all"; InputError for unknown names.
    Report run(const std::string& suite);

    const Scene& scene() const { return m_scene; }
    const BolzaContext& bolza();
    const std::vector<cplx>& second_differential();

    Report fuchsian();
    Report fields();
    Report tensorcalc();
    Report funnel();
    Report uniformize();
    Report einstein3d();
    Report variation();

private:
    Scene m_scene;
    std::unique_ptr<BolzaContext> m_bolza;
    std::vector<cplx> m_q2;
};

/// Multiplies every tolerance by `scale` and recomputes pass as residual <= tolerance.
void rescale_tolerances(Report& report, double scale);

} // namespace renvol
