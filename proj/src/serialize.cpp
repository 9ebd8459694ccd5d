#include "tgfl/serialize.hpp"
