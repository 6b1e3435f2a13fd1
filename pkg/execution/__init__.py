# Involution walk analyses; modules import each other by bare name with execution/ on the path
