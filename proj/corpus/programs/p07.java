public class SearchInsert {
    public static int main(String[] args) {
        int[] nums = {1, 3, 5, 6};
        int target = 5;
        int lo = 0;
        int hi = nums.length - 1;
        int pos = nums.length;
        while (lo <= hi) {
            int mid = (lo + hi) / 2;
            if (nums[mid] == target) {
                pos = mid;
                break;
            } else if (nums[mid] < target) {
                lo = mid + 1;
            } else {
                hi = mid - 1;
            }
        }
        return pos;
    }
}
