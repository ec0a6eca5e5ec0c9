#include "hucai/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hucai/error.hpp"

namespace hucai {

namespace {
constexpr double kPi = std::numbers::pi;

std::string joined(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : ", ") + s;
    return out;
}
}  // namespace

const std::vector<std::string>& source_profile_names() {
    static const std::vector<std::string> names = {"zero", "constant", "bump", "sine"};
    return names;
}

const std::vector<std::string>& conductance_profile_names() {
    static const std::vector<std::string> names = {"zero", "sine", "bubble"};
    return names;
}

ScalarField source_profile(const std::string& name, const Grid2D& g, double amplitude, double width) {
    g.validate();
    if (!std::isfinite(amplitude)) throw InvalidArgument("source_profile: amplitude must be finite");
    if (name == "zero") return ScalarField(g);
    if (name == "constant") return ScalarField(g, amplitude);
    if (name == "bump") {
        if (!(width > 0.0)) throw InvalidArgument("source_profile: width must be positive");
        return ScalarField::sample(g, [=](double x, double y) {
            const double r2 = (x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5);
            return amplitude * std::exp(-r2 / (2.0 * width * width));
        });
    }
    if (name == "sine") {
        return ScalarField::sample(g, [=](double x, double y) {
            return amplitude * std::sin(kPi * x) * std::sin(kPi * y);
        });
    }
    throw InvalidArgument("unknown source profile '" + name + "' (known: " +
                          joined(source_profile_names()) + ")");
}

VectorField2 conductance_profile(const std::string& name, const Grid2D& g, double amplitude) {
    g.validate();
    if (!std::isfinite(amplitude)) throw InvalidArgument("conductance_profile: amplitude must be finite");
    VectorField2 m;
    if (name == "zero") {
        return VectorField2(g);
    } else if (name == "sine") {
        m = VectorField2::sample(g, [=](double x, double y) {
            return Vec2{amplitude * std::sin(2 * kPi * x) * std::sin(kPi * y),
                        amplitude * std::sin(kPi * x) * std::sin(2 * kPi * y)};
        });
    } else if (name == "bubble") {
        m = VectorField2::sample(g, [=](double x, double y) {
            const double b = amplitude * std::sin(kPi * x) * std::sin(kPi * y);
            return Vec2{b, b};
        });
    } else {
        throw InvalidArgument("unknown conductance profile '" + name + "' (known: " +
                              joined(conductance_profile_names()) + ")");
    }
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            if (g.on_boundary(i, j)) m.set(g.index(i, j), {0.0, 0.0});
    return m;
}

}  // namespace hucai
