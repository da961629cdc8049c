#include <gtest/gtest.h>

#include <regex>
#include <sstream>

#include "tropgrad/error.hpp"
#include "tropgrad/svg.hpp"

using namespace tropgrad;

namespace {

std::vector<std::pair<double, double>> polyline_points(const std::string& svg, std::size_t which) {
  const std::regex re("<polyline[^>]*points=\"([^\"]*)\"");
  auto it = std::sregex_iterator(svg.begin(), svg.end(), re);
  for (std::size_t i = 0; i < which; ++i) ++it;
  std::vector<std::pair<double, double>> out;
  std::istringstream in((*it)[1].str());
  std::string tok;
  while (in >> tok) {
    const auto comma = tok.find(',');
    out.emplace_back(std::stod(tok.substr(0, comma)), std::stod(tok.substr(comma + 1)));
  }
  return out;
}

std::size_t count(const std::string& s, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST(Svg, StructureAndLegend) {
  const std::vector<EcdfSeries> series{
      {"TD", {{-6.2, 0.25}, {-5.0, 0.5}, {-4.1, 0.75}, {-3.3, 1.0}}},
      {"CD <&>", {{-2.0, 0.5}, {-1.0, 1.0}}},
  };
  SvgOptions o;
  o.title = "Fermat-Weber";
  const auto svg = ecdf_svg(series, o);
  EXPECT_EQ(svg.rfind("<svg xmlns=\"http://www.w3.org/2000/svg\"", 0), 0u);
  EXPECT_EQ(svg.substr(svg.size() - 7), "</svg>\n");
  EXPECT_EQ(count(svg, "<polyline"), 2u);
  EXPECT_NE(svg.find(">TD</text>"), std::string::npos);
  EXPECT_NE(svg.find(">CD &lt;&amp;&gt;</text>"), std::string::npos);
  EXPECT_NE(svg.find(">Fermat-Weber</text>"), std::string::npos);
  EXPECT_NE(svg.find(">log relative error</text>"), std::string::npos);
  // Integer ticks from floor(min) to ceil(max).
  EXPECT_NE(svg.find(">-7</text>"), std::string::npos);
  EXPECT_NE(svg.find(">-1</text>"), std::string::npos);
  EXPECT_EQ(svg, ecdf_svg(series, o));
}

TEST(Svg, StepsAreMonotoneAndInsideThePlot) {
  const std::vector<EcdfSeries> series{{"a", {{-3.0, 0.2}, {-2.5, 0.4}, {-2.5, 0.6}, {0.5, 1.0}}}};
  SvgOptions o;
  const auto pts = polyline_points(ecdf_svg(series, o), 0);
  ASSERT_EQ(pts.size(), 2 + 2 * 4u);
  const double left = 60, right = o.width - 150.0, top = 30, bottom = o.height - 50.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    EXPECT_GE(pts[i].first, left - 1e-9);
    EXPECT_LE(pts[i].first, right + 1e-9);
    EXPECT_GE(pts[i].second, top - 1e-9);
    EXPECT_LE(pts[i].second, bottom + 1e-9);
    if (i) {
      EXPECT_GE(pts[i].first, pts[i - 1].first);
      EXPECT_LE(pts[i].second, pts[i - 1].second);  // screen y shrinks as the fraction grows
    }
  }
  EXPECT_NEAR(pts.front().second, bottom, 1e-9);
  EXPECT_NEAR(pts.back().second, top, 1e-9);
}

TEST(Svg, SkipsNonFiniteAndHandlesEmptyInput) {
  const std::vector<EcdfSeries> series{{"a", {{-std::numeric_limits<double>::infinity(), 0.5}, {-1.0, 1.0}}}};
  EXPECT_EQ(polyline_points(ecdf_svg(series), 0).size(), 4u);
  const auto empty = ecdf_svg({});
  EXPECT_EQ(count(empty, "<polyline"), 0u);
  SvgOptions tiny;
  tiny.width = 100;
  EXPECT_THROW(ecdf_svg({}, tiny), InvalidInput);
}
