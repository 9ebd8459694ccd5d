#include "tgfl/gallery.hpp"
