#include <doctest.h>

#include "support/gradcheck_cases.hpp"

TEST_SUITE("gradcheck") {
  TEST_CASE("every op passes central finite differences on a few seeds") {
    for (const auto& c : testing::gradient_cases()) {
      for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto r = c.run(seed);
        CAPTURE(c.name);
        CAPTURE(seed);
        CAPTURE(r.worst);
        CHECK(r.checked > 0);
        CHECK(r.max_rel_error < 1e-4);
      }
    }
  }

  TEST_CASE("the checker notices a wrong gradient") {
    auto x = vgs::ad::parameter(vgs::ad::Tensor<double>({2}, {0.5, -1.0}));
    // A leaf-only graph whose closure reports twice the true gradient.
    auto broken = [&] {
      auto out = std::make_shared<vgs::ad::Node<double>>();
      out->tensor = vgs::ad::Tensor<double>({1}, {x->values()[0] + x->values()[1]});
      out->requires_grad = true;
      out->parents = {x};
      out->backward_fn = [x](vgs::ad::Node<double>& self) {
        for (auto& g : x->grad()) g += 2 * self.grad()[0];
      };
      return vgs::ad::Var<double>(out);
    };
    CHECK(testing::grad_check({{"x", x}}, broken).max_rel_error > 0.4);
  }
}
