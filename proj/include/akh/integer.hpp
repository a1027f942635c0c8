#pragma once

#include <boost/multiprecision/cpp_int.hpp>

namespace akh {

using BigInt = boost::multiprecision::cpp_int;

}  // namespace akh
