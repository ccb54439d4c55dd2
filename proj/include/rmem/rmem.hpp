#pragma once

#include "rmem/errors.hpp"
#include "rmem/functionals.hpp"
#include "rmem/io.hpp"
#include "rmem/mesh.hpp"
#include "rmem/numerics.hpp"
#include "rmem/ode.hpp"
#include "rmem/params.hpp"
#include "rmem/profile.hpp"
#include "rmem/shooting.hpp"
#include "rmem/surface.hpp"
#include "rmem/verify.hpp"
