#ifndef COARSEKIT_ERRORS_HPP
#define COARSEKIT_ERRORS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace coarsekit {

// Base class for all library errors. `code()` is a stable machine-readable
// tag; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& msg)
        : std::runtime_error(code + ": " + msg), code_(std::move(code)) {}
    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

class BudgetExceeded : public Error {
public:
    explicit BudgetExceeded(std::uint64_t seen)
        : Error("BudgetExceeded", "budget exhausted after " + std::to_string(seen) + " units"),
          seen_(seen) {}
    std::uint64_t nodes_seen() const noexcept { return seen_; }

private:
    std::uint64_t seen_;
};

#define COARSEKIT_DEFINE_ERROR(Name)                                  \
    class Name : public Error {                                       \
    public:                                                           \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}  \
    }

COARSEKIT_DEFINE_ERROR(InvalidInput);
COARSEKIT_DEFINE_ERROR(NotCoarselyConnected);
COARSEKIT_DEFINE_ERROR(DomainMismatch);
COARSEKIT_DEFINE_ERROR(NotAPartition);
COARSEKIT_DEFINE_ERROR(NotFoundWithinRadius);
COARSEKIT_DEFINE_ERROR(NotConnected);
COARSEKIT_DEFINE_ERROR(GenerationFailure);
COARSEKIT_DEFINE_ERROR(LoopInvalid);
COARSEKIT_DEFINE_ERROR(HypothesisViolated);
COARSEKIT_DEFINE_ERROR(PointOffCircle);
COARSEKIT_DEFINE_ERROR(BadParams);
COARSEKIT_DEFINE_ERROR(TooFewSamples);
COARSEKIT_DEFINE_ERROR(NotATree);
COARSEKIT_DEFINE_ERROR(DegreeTooSmall);
COARSEKIT_DEFINE_ERROR(NoEvaluation);
COARSEKIT_DEFINE_ERROR(BadN);
COARSEKIT_DEFINE_ERROR(LetterClash);
COARSEKIT_DEFINE_ERROR(NotAUnit);
COARSEKIT_DEFINE_ERROR(DimensionMismatch);

#undef COARSEKIT_DEFINE_ERROR

// Global comparison tolerance for floating-point distances.
inline constexpr double kTol = 1e-9;

// Budget shared by node/move/subset counting loops. `charge` throws once the
// limit is crossed, reporting how many units were consumed.
struct Budget {
    std::uint64_t limit = 1'000'000;
    std::uint64_t used = 0;

    explicit Budget(std::uint64_t lim = 1'000'000) : limit(lim) {}

    void charge(std::uint64_t n = 1) {
        used += n;
        if (used > limit) throw BudgetExceeded(used);
    }
    std::uint64_t remaining() const { return used >= limit ? 0 : limit - used; }
};

}  // namespace coarsekit

#endif
