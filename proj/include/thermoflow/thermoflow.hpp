#pragma once

#include "thermoflow/errors.hpp"
#include "thermoflow/contact_point.hpp"
#include "thermoflow/scalar_field.hpp"
#include "thermoflow/numdiff.hpp"
#include "thermoflow/contact_geometry.hpp"
#include "thermoflow/thermo_systems.hpp"
#include "thermoflow/discrete_gradients.hpp"
#include "thermoflow/newton.hpp"
#include "thermoflow/integrators.hpp"
#include "thermoflow/herglotz.hpp"
#include "thermoflow/trajectory.hpp"
#include "thermoflow/reference.hpp"
#include "thermoflow/steppers.hpp"
#include "thermoflow/io/csv.hpp"
#include "thermoflow/io/svg.hpp"
