#pragma once

#include <stdexcept>
#include <string>

namespace qgraph {

// Base class for all typed failures.  code() is a stable machine-readable
// identifier (used verbatim in CLI error bodies and exit-code mapping).
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string& what)
      : std::runtime_error(what), code_(std::move(code)) {}
  const std::string& code() const noexcept { return code_; }

private:
  std::string code_;
};

#define QGRAPH_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                       \
  public:                                                            \
    explicit Name(const std::string& what = #Name)                  \
        : Error(#Name, what) {}                                     \
  }

// Input / construction errors.
QGRAPH_DEFINE_ERROR(NonHermitianMatrix);
QGRAPH_DEFINE_ERROR(EmptyLeads);
QGRAPH_DEFINE_ERROR(NonpositiveLength);
QGRAPH_DEFINE_ERROR(DimensionMismatch);
QGRAPH_DEFINE_ERROR(UnsortedPoints);
QGRAPH_DEFINE_ERROR(NotHermitian);
QGRAPH_DEFINE_ERROR(NonzeroPotential);
QGRAPH_DEFINE_ERROR(NotNegativePotential);

// Integrator errors.
QGRAPH_DEFINE_ERROR(StepSizeUnderflow);
QGRAPH_DEFINE_ERROR(ToleranceNotMet);
QGRAPH_DEFINE_ERROR(OutOfRange);

// Spectral / Weyl evaluation errors.
QGRAPH_DEFINE_ERROR(ZeroSpectralPoint);
QGRAPH_DEFINE_ERROR(IntegralNotConverged);
QGRAPH_DEFINE_ERROR(NearSingularN1);
QGRAPH_DEFINE_ERROR(DirichletEigenvalueHit);
QGRAPH_DEFINE_ERROR(NeumannTripletPole);
QGRAPH_DEFINE_ERROR(ExtrapolationDiverged);

// Counting / assembly errors.
QGRAPH_DEFINE_ERROR(MissingBlock);
QGRAPH_DEFINE_ERROR(NonnegativityNotEstablished);
QGRAPH_DEFINE_ERROR(NonnegativityFailed);

// Scattering errors.
QGRAPH_DEFINE_ERROR(PoleHit);
QGRAPH_DEFINE_ERROR(SingularAlphaMinusK);
QGRAPH_DEFINE_ERROR(SingularFactor);
QGRAPH_DEFINE_ERROR(ZeroWeylValue);
QGRAPH_DEFINE_ERROR(SingularAtZeta);

// Discretization / oracle errors.
QGRAPH_DEFINE_ERROR(MeshTooCoarse);
QGRAPH_DEFINE_ERROR(CountUnstable);
QGRAPH_DEFINE_ERROR(SolverFailure);

#undef QGRAPH_DEFINE_ERROR

}  // namespace qgraph
