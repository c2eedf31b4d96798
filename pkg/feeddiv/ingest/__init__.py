# Instance reconstruction from follower edges and tweet records
