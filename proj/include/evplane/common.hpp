#ifndef EVPLANE_COMMON_HPP
#define EVPLANE_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace evplane {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Labels = std::vector<int>;

inline constexpr double kLn2 = 0.693147180559945309417232121458176568;

inline double nats_to_bits(double nats) { return nats / kLn2; }
inline double bits_to_nats(double bits) { return bits * kLn2; }

// Every failure raised by the library derives from Error; the CLI maps the
// category onto its exit code.
class Error : public std::runtime_error {
 public:
  enum class Category { config, data, numeric, usage };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

#define EVPLANE_DEFINE_ERROR(Name, Cat)                             \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what)                          \
        : Error(Category::Cat, #Name ": " + what) {}                \
  };

EVPLANE_DEFINE_ERROR(ArchitectureError, usage)
EVPLANE_DEFINE_ERROR(ShapeError, usage)
EVPLANE_DEFINE_ERROR(LabelError, usage)
EVPLANE_DEFINE_ERROR(TraceError, usage)
EVPLANE_DEFINE_ERROR(DomainError, usage)
EVPLANE_DEFINE_ERROR(ResourceError, usage)
EVPLANE_DEFINE_ERROR(EncodingError, usage)
EVPLANE_DEFINE_ERROR(EvaluationError, usage)
EVPLANE_DEFINE_ERROR(SampleSizeError, usage)
EVPLANE_DEFINE_ERROR(ConfigError, config)
EVPLANE_DEFINE_ERROR(IngestionError, data)
EVPLANE_DEFINE_ERROR(GenerationError, data)
EVPLANE_DEFINE_ERROR(OptimizerError, numeric)

#undef EVPLANE_DEFINE_ERROR

// splitmix64 finalizer; used to expand one seed into independent streams.
inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream + 1));
}

}  // namespace evplane

#endif  // EVPLANE_COMMON_HPP
